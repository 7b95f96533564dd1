#include <catch2/catch_amalgamated.hpp>

#include "horomass/charts.hpp"

#include <random>

using namespace horomass;

namespace {

std::mt19937 rng(20240811);

Vec random_vec(int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Point random_point(ChartId chart, int n, double scale) {
  Vec v = random_vec(n, scale);
  if (chart == ChartId::HalfSpace) v[0] = std::abs(v[0]) + 0.05;
  return Point{chart, v};
}

// Centered finite differences of a scalar function of chart coordinates.
template <class F>
Vec fd_grad(F&& f, const Vec& x, double rel = 1e-6) {
  const int n = static_cast<int>(x.size());
  Vec g(n);
  for (int k = 0; k < n; ++k) {
    const double s = rel * std::max(1.0, std::abs(x[k]));
    Vec xp = x, xm = x;
    xp[k] += s;
    xm[k] -= s;
    g[k] = (f(xp) - f(xm)) / (2.0 * s);
  }
  return g;
}

template <class F>
Mat fd_hess(F&& f, const Vec& x, double rel = 1e-4) {
  const int n = static_cast<int>(x.size());
  Mat h(n, n);
  const double f0 = f(x);
  for (int k = 0; k < n; ++k) {
    const double sk = rel * std::max(1.0, std::abs(x[k]));
    for (int l = k; l < n; ++l) {
      double v;
      if (l == k) {
        Vec xp = x, xm = x;
        xp[k] += sk;
        xm[k] -= sk;
        v = (f(xp) - 2.0 * f0 + f(xm)) / (sk * sk);
      } else {
        const double sl = rel * std::max(1.0, std::abs(x[l]));
        Vec xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[k] += sk; xpp[l] += sl;
        xpm[k] += sk; xpm[l] -= sl;
        xmp[k] -= sk; xmp[l] += sl;
        xmm[k] -= sk; xmm[l] -= sl;
        v = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * sk * sl);
      }
      h(k, l) = v;
      h(l, k) = v;
    }
  }
  return h;
}

}  // namespace

TEST_CASE("radial coordinate closed values") {
  Vec x(3);
  x << 2.0, 0.0, 0.0;
  CHECK(radial_coordinate({ChartId::Horospherical, x}) ==
        Catch::Approx(std::sinh(2.0)).epsilon(1e-13));

  Vec y(3);
  y << 1.0, 0.0, 0.0;  // half-space basepoint y_1 = 1 is the hyperboloid vertex
  CHECK(radial_coordinate({ChartId::HalfSpace, y}) == Catch::Approx(0.0).margin(1e-14));

  Vec z(4);
  z << 0.3, -1.2, 0.4, 2.0;
  CHECK(radial_coordinate({ChartId::Hyperboloidal, z}) == Catch::Approx(z.norm()));
}

TEST_CASE("t coordinate agrees across charts") {
  for (int n : {3, 4}) {
    for (int it = 0; it < 50; ++it) {
      const Point p = random_point(ChartId::Horospherical, n, 2.0);
      const double t = t_coordinate(p);
      CHECK(t_coordinate(to_chart(p, ChartId::Hyperboloidal)) == Catch::Approx(t).epsilon(1e-12));
      CHECK(t_coordinate(to_chart(p, ChartId::HalfSpace)) == Catch::Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("chart transforms round trip") {
  const ChartId charts[] = {ChartId::Hyperboloidal, ChartId::HalfSpace, ChartId::Horospherical};
  for (int n : {3, 4, 5}) {
    for (ChartId from : charts)
      for (ChartId to : charts) {
        if (from == to) continue;
        for (int it = 0; it < 30; ++it) {
          const Point p = random_point(from, n, 1.5);
          const Point back = to_chart(to_chart(p, to), from);
          REQUIRE(back.chart == from);
          for (int i = 0; i < n; ++i)
            CHECK(back.x[i] == Catch::Approx(p.x[i]).epsilon(1e-11).margin(1e-12));
        }
      }
  }
}

TEST_CASE("lateral coordinates copy bitwise between horospherical and half-space") {
  for (int it = 0; it < 20; ++it) {
    const Point p = random_point(ChartId::Horospherical, 4, 3.0);
    const Point q = to_chart(p, ChartId::HalfSpace);
    for (int i = 1; i < 4; ++i) CHECK(q.x[i] == p.x[i]);
    const Point r = to_chart(q, ChartId::Horospherical);
    for (int i = 1; i < 4; ++i) CHECK(r.x[i] == q.x[i]);
  }
}

TEST_CASE("chart domain errors") {
  Vec bad(3);
  bad << -0.5, 1.0, 0.0;
  CHECK_THROWS_AS(validate_point({ChartId::HalfSpace, bad}), DomainError);

  Vec z(3);
  z << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(to_chart({ChartId::Cartesian, z}, ChartId::Hyperboloidal), DomainError);
  CHECK_THROWS_AS(to_chart({ChartId::Hyperboloidal, z}, ChartId::Cartesian), DomainError);
  CHECK_THROWS_AS(t_coordinate({ChartId::Cartesian, z}), DomainError);

  Vec far(3);
  far << 800.0, 0.2, 0.0;
  CHECK_THROWS_AS(to_chart({ChartId::Horospherical, far}, ChartId::HalfSpace), NonFinite);
  CHECK_THROWS_AS(to_chart({ChartId::Horospherical, far}, ChartId::Hyperboloidal), NonFinite);

  Vec two(2);
  two << 1.0, 2.0;
  CHECK_THROWS_AS(validate_point({ChartId::Hyperboloidal, two}), DomainError);
}

TEST_CASE("rotation to axis is orthogonal and maps e1") {
  for (int n : {3, 4}) {
    for (int it = 0; it < 20; ++it) {
      Vec a = random_vec(n, 1.0);
      if (a.norm() < 1e-3) continue;
      a.normalize();
      const Mat r = rotation_to_axis(a);
      if (r.size() == 0) {
        CHECK((a - Vec::Unit(n, 0)).norm() < 1e-13);
        continue;
      }
      CHECK((r * Vec::Unit(n, 0) - a).norm() < 1e-13);
      CHECK((r.transpose() * r - Mat::Identity(n, n)).norm() < 1e-13);
    }
  }
  Vec e1 = Vec::Unit(3, 0);
  CHECK(rotation_to_axis(e1).size() == 0);
}

TEST_CASE("tz jets match finite differences") {
  const ChartId charts[] = {ChartId::Hyperboloidal, ChartId::Horospherical, ChartId::HalfSpace};
  for (int n : {3, 4}) {
    Vec axis = random_vec(n, 1.0);
    axis[0] += 2.0;
    axis.normalize();
    const Mat rot = rotation_to_axis(axis);
    for (ChartId chart : charts) {
      for (bool rotated : {false, true}) {
        Frame frame{chart, rotated ? rot : Mat()};
        for (int it = 0; it < 10; ++it) {
          Vec x = random_vec(n, 1.2);
          if (chart == ChartId::HalfSpace) x[0] = std::abs(x[0]) + 0.2;
          const TZJet j = tz_jet(frame, x);

          auto tfun = [&](const Vec& y) { return tz_jet(frame, y).t; };
          const Vec gt = fd_grad(tfun, x);
          const Mat ht = fd_hess(tfun, x);
          CHECK((j.dt - gt).norm() < 1e-7 * (1.0 + gt.norm()));
          CHECK((j.d2t - ht).norm() < 1e-5 * (1.0 + ht.norm()));

          for (int a = 0; a < n; ++a) {
            auto zfun = [&](const Vec& y) { return tz_jet(frame, y).z[a]; };
            const Vec gz = fd_grad(zfun, x);
            const Mat hz = fd_hess(zfun, x);
            CHECK((j.dz.row(a).transpose() - gz).norm() < 1e-7 * (1.0 + gz.norm()));
            CHECK((j.d2z[a] - hz).norm() < 1e-5 * (1.0 + hz.norm()));
          }
        }
      }
    }
  }
}

TEST_CASE("tz jet z agrees with chart transform") {
  for (int it = 0; it < 20; ++it) {
    const Point p = random_point(ChartId::Horospherical, 3, 2.0);
    const TZJet j = tz_jet(plain_frame(ChartId::Horospherical), p.x);
    const Point z = to_chart(p, ChartId::Hyperboloidal);
    CHECK((j.z - z.x).norm() < 1e-12 * (1.0 + z.x.norm()));
    CHECK(j.t == Catch::Approx(t_coordinate(p)).epsilon(1e-13));
  }
}

TEST_CASE("chart jets match finite differences of the transform") {
  const int n = 3;
  Vec axis(n);
  axis << 0.6, -0.8, 0.0;
  for (bool rotated : {false, true}) {
    Frame frame{ChartId::Horospherical, rotated ? rotation_to_axis(axis) : Mat()};
    for (int it = 0; it < 10; ++it) {
      const Vec x = random_vec(n, 1.5);
      const ChartJets cj = chart_jets3(frame, x);
      for (int a = 0; a < n; ++a) {
        auto za = [&](const Vec& y) { return chart_jets3(frame, y).z[a]; };
        const Vec g = fd_grad(za, x);
        const Mat h = fd_hess(za, x);
        CHECK((cj.J.row(a).transpose() - g).norm() < 1e-7 * (1.0 + g.norm()));
        CHECK((cj.K[a] - h).norm() < 1e-5 * (1.0 + h.norm()));
        for (int i = 0; i < n; ++i) {
          auto ka = [&](const Vec& y) { return chart_jets3(frame, y).J(a, i); };
          const Mat l = fd_hess(ka, x);
          CHECK((cj.L[a][i] - l).norm() < 1e-4 * (1.0 + l.norm()));
        }
      }
    }
  }
}

TEST_CASE("pullback matches finite differences on a synthetic tensor") {
  const int n = 3;
  auto Gfun = [](const Vec& z) {
    Mat g(3, 3);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        g(a, b) = (a == b ? 2.0 : 0.0) + 0.3 * std::sin(z[a] + 2.0 * z[b]) +
                  0.3 * std::sin(z[b] + 2.0 * z[a]);
    return g;
  };
  auto Gjet = [&](const Vec& z, Mat& G, Ten3& DG, Ten4& D2G) {
    G = Gfun(z);
    for (int c = 0; c < n; ++c) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double ca = (c == a) ? 1.0 : 0.0, cb = (c == b) ? 1.0 : 0.0;
          DG[c](a, b) = 0.3 * std::cos(z[a] + 2.0 * z[b]) * (ca + 2.0 * cb) +
                        0.3 * std::cos(z[b] + 2.0 * z[a]) * (cb + 2.0 * ca);
        }
    }
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double ca = (c == a) ? 1.0 : 0.0, cb = (c == b) ? 1.0 : 0.0;
            const double da = (d == a) ? 1.0 : 0.0, db = (d == b) ? 1.0 : 0.0;
            D2G(c, d)(a, b) = -0.3 * std::sin(z[a] + 2.0 * z[b]) * (ca + 2.0 * cb) * (da + 2.0 * db) -
                              0.3 * std::sin(z[b] + 2.0 * z[a]) * (cb + 2.0 * ca) * (db + 2.0 * da);
          }
  };

  Frame frame = plain_frame(ChartId::Horospherical);
  auto pulled = [&](const Vec& x) {
    const ChartJets cj = chart_jets3(frame, x);
    Mat g;
    pullback_sym2(cj, Gfun(cj.z), nullptr, nullptr, g, nullptr, nullptr);
    return g;
  };

  for (int it = 0; it < 8; ++it) {
    const Vec x = random_vec(n, 1.0);
    const ChartJets cj = chart_jets3(frame, x);
    Mat G;
    Ten3 DG(n);
    Ten4 D2G(n);
    Gjet(cj.z, G, DG, D2G);
    Mat g;
    Ten3 dg(n);
    Ten4 d2g(n);
    pullback_sym2(cj, G, &DG, &D2G, g, &dg, &d2g);

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto gij = [&](const Vec& y) { return pulled(y)(i, j); };
        const Vec grad = fd_grad(gij, x);
        const Mat hess = fd_hess(gij, x);
        for (int k = 0; k < n; ++k) {
          CHECK(dg[k](i, j) == Catch::Approx(grad[k]).epsilon(5e-6).margin(5e-7));
          for (int l = 0; l < n; ++l)
            CHECK(d2g(k, l)(i, j) == Catch::Approx(hess(k, l)).epsilon(5e-4).margin(5e-4));
        }
      }
  }
}
