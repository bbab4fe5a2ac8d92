#include "phjb/certificates.hpp"

#include <cmath>
#include <sstream>

#include "phjb/error.hpp"
#include "phjb/sampling.hpp"

namespace phjb {

namespace {

TestFunctionParts zero_phi(int dim) {
  CylinderSpec spec;
  spec.name = "zero";
  spec.f = [](double, const std::vector<HVec>&) { return 0.0; };
  spec.f_t = [](double, const std::vector<HVec>&) { return 0.0; };
  spec.grad = [dim](double, const std::vector<HVec>&) { return std::vector<HVec>{HVec::Zero(dim)}; };
  return cylinder(std::move(spec));
}

// sign * (sigma x_1 + t - T)
TestFunctionParts linear_phi(int dim, double sigma, double sign, double final_time) {
  CylinderSpec spec;
  spec.name = sign > 0 ? "tangent_above" : "tangent_below";
  spec.f = [=](double t, const std::vector<HVec>& xs) { return sign * (sigma * xs[0][0] + t - final_time); };
  spec.f_t = [=](double, const std::vector<HVec>&) { return sign; };
  spec.grad = [=](double, const std::vector<HVec>&) {
    HVec g = HVec::Zero(dim);
    g[0] = sign * sigma;
    return std::vector<HVec>{g};
  };
  return cylinder(std::move(spec));
}

// sign * |gamma(min(t, tau))|
TestFunctionParts past_peak_phi(int dim, double tau, double sign) {
  CylinderSpec spec;
  spec.name = sign > 0 ? "past_peak" : "neg_past_peak";
  spec.taus = {tau};
  spec.f = [sign](double, const std::vector<HVec>& xs) { return sign * xs[1].norm(); };
  spec.f_t = [](double, const std::vector<HVec>&) { return 0.0; };
  spec.grad = [dim, sign](double, const std::vector<HVec>& xs) {
    const double r = xs[1].norm();
    HVec g = r > 0.0 ? HVec(sign * xs[1] / r) : HVec(HVec::Zero(dim));
    return std::vector<HVec>{HVec::Zero(dim), g};
  };
  return cylinder(std::move(spec));
}

Path wiggly_prefix(const SpacePtr& space, const TimeGrid& grid, int last, double endpoint, double amp) {
  std::vector<HVec> samples;
  for (int i = 0; i <= last; ++i) {
    HVec x = space->zero();
    x[0] = i == last ? endpoint : endpoint + amp * std::sin(3.0 * i + 1.0);
    samples.push_back(x);
  }
  return Path(space, grid, std::move(samples));
}

std::string num(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

int index_near(const TimeGrid& grid, double fraction) {
  return std::clamp(static_cast<int>(std::lround(fraction * grid.steps())), 0, grid.steps() - 1);
}

}  // namespace

std::vector<TouchingPoint> eikonal_touching_points(const SpacePtr& space, const TimeGrid& grid) {
  if (space->dim() != 1) throw PreconditionError("eikonal touching points need dim 1");
  const int n = grid.steps();
  const double T = grid.final_time;
  const double h = grid.step;
  // (time fraction, endpoint in lattice steps relative to the remaining time)
  struct Spec {
    double frac;
    int offset;  // endpoint = sign * (remaining steps + offset) * h
    double sign;
  };
  const Spec specs[] = {{0.25, -2, 1.0}, {0.5, -1, -1.0}, {0.0, -3, 1.0}, {0.25, 2, 1.0},
                        {0.5, 3, -1.0}, {0.75, 1, 1.0}};
  std::vector<TouchingPoint> out;
  for (const Spec& s : specs) {
    const int ti = index_near(grid, s.frac);
    const int remaining = n - ti;
    const int k = std::max(remaining + s.offset, 0);
    const double x0 = s.sign * k * h;
    const Path point = wiggly_prefix(space, grid, ti, x0, 0.2);
    const double tau = T - grid.time(ti);
    TouchingPoint tp{"", point, {}, GaugePack::none(), {}, GaugePack::none()};
    if (std::abs(x0) < tau) {
      const double d = tau - std::abs(x0);
      tp.label = "eikonal flat t=" + num(grid.time(ti)) + " x=" + num(x0);
      tp.sub_phi = zero_phi(1);
      tp.sub_gauge = GaugePack::anchored(point, 2.0 / d);
      tp.super_phi = zero_phi(1);
    } else if (std::abs(x0) > tau) {
      const double a = std::abs(x0) - tau;
      const double sigma = x0 > 0 ? 1.0 : -1.0;
      tp.label = "eikonal linear t=" + num(grid.time(ti)) + " x=" + num(x0);
      tp.sub_phi = linear_phi(1, sigma, 1.0, T);
      tp.sub_gauge = GaugePack::anchored(point, 1.0 / a);
      tp.super_phi = linear_phi(1, sigma, -1.0, T);
    } else {
      continue;  // kink
    }
    out.push_back(std::move(tp));
  }
  return out;
}

std::vector<TouchingPoint> runmax_touching_points(const SpacePtr& space, const TimeGrid& grid) {
  const int n = grid.steps();
  if (n < 4) throw PreconditionError("runmax touching points need at least 4 steps");
  struct Spec {
    double frac;
    double peak;
    double endpoint;
  };
  const Spec specs[] = {{0.375, 1.0, 0.1}, {0.5, -1.5, 0.4}, {0.625, 0.8, -0.2},
                        {0.75, 2.0, -0.5}, {0.5, -0.6, 0.0}};
  std::vector<TouchingPoint> out;
  for (const Spec& s : specs) {
    const int ti = std::max(index_near(grid, s.frac), 2);
    const int peak_index = ti / 2;
    std::vector<HVec> samples;
    double others = 0.0;
    for (int i = 0; i <= ti; ++i) {
      HVec x = space->zero();
      if (i == peak_index) {
        x[0] = s.peak;
      } else if (i == ti) {
        x[0] = s.endpoint;
      } else {
        x[0] = 0.4 * std::abs(s.peak) * std::sin(2.0 * i + 0.5);
      }
      if (space->dim() > 1) x[1] = i == peak_index ? 0.0 : 0.05 * std::cos(i);
      if (i != peak_index) others = std::max(others, x.norm());
      samples.push_back(x);
    }
    const Path point(space, grid, std::move(samples));
    const double tau = grid.time(peak_index);
    const double b = std::abs(s.peak) - others;
    TouchingPoint tp{"runmax t=" + num(point.horizon()) + " peak=" + num(s.peak),
                     point,
                     past_peak_phi(space->dim(), tau, 1.0),
                     GaugePack::anchored(point, 2.0 / b),
                     past_peak_phi(space->dim(), tau, -1.0),
                     GaugePack::none()};
    out.push_back(std::move(tp));
  }
  return out;
}

TestFunctionParts time_shifted(const TestFunctionParts& phi, double k, double final_time) {
  TestFunctionParts out = phi;
  out.name = phi.name + "+k(T-t)";
  out.value = [v = phi.value, k, final_time](const Path& g) { return v(g) + k * (final_time - g.horizon()); };
  out.dt = [d = phi.dt, k](const Path& g) { return d(g) - k; };
  return out;
}

std::vector<TestFunctionParts> ito_test_functionals(int dim, double tau) {
  std::vector<TestFunctionParts> out;
  {
    CylinderSpec spec;
    spec.name = "quadratic";
    spec.f = [](double, const std::vector<HVec>& xs) { return xs[0].squaredNorm(); };
    spec.f_t = [](double, const std::vector<HVec>&) { return 0.0; };
    spec.grad = [](double, const std::vector<HVec>& xs) { return std::vector<HVec>{2.0 * xs[0]}; };
    out.push_back(cylinder(std::move(spec)));
  }
  {
    CylinderSpec spec;
    spec.name = "time_weighted_pairing";
    spec.taus = {tau};
    spec.f = [](double t, const std::vector<HVec>& xs) { return t * xs[0][0] + xs[1].dot(xs[0]); };
    spec.f_t = [](double, const std::vector<HVec>& xs) { return xs[0][0]; };
    spec.grad = [](double t, const std::vector<HVec>& xs) {
      HVec g0 = xs[1];
      g0[0] += t;
      return std::vector<HVec>{g0, xs[0]};
    };
    out.push_back(cylinder(std::move(spec)));
  }
  {
    CylinderSpec spec;
    spec.name = "damped_sine";
    spec.taus = {tau};
    spec.f = [](double t, const std::vector<HVec>& xs) {
      return std::exp(-t) * std::sin(xs[0][0]) + 0.5 * xs[1].squaredNorm();
    };
    spec.f_t = [](double t, const std::vector<HVec>& xs) { return -std::exp(-t) * std::sin(xs[0][0]); };
    spec.grad = [dim](double t, const std::vector<HVec>& xs) {
      HVec g0 = HVec::Zero(dim);
      g0[0] = std::exp(-t) * std::cos(xs[0][0]);
      return std::vector<HVec>{g0, xs[1]};
    };
    out.push_back(cylinder(std::move(spec)));
  }
  return out;
}

TestFunctionParts linear_test_functional(int dim) {
  CylinderSpec spec;
  spec.name = "linear";
  spec.f = [](double, const std::vector<HVec>& xs) { return xs[0][0]; };
  spec.f_t = [](double, const std::vector<HVec>&) { return 0.0; };
  spec.grad = [dim](double, const std::vector<HVec>&) {
    HVec g = HVec::Zero(dim);
    g[0] = 1.0;
    return std::vector<HVec>{g};
  };
  return cylinder(std::move(spec));
}

std::vector<Path> touching_net(const Coefficients& c, const Path& point, int depth, int samples,
                               Rng& rng, NetStyle style) {
  const TimeGrid& grid = point.grid();
  const int n = grid.steps();
  std::vector<Path> net{point};
  std::vector<Path> frontier{point};
  for (int level = 0; level < depth && frontier.front().last_index() < n; ++level) {
    std::vector<Path> next;
    for (const Path& p : frontier) {
      for (Control u : c.controls) next.push_back(p.appended(mild_step(c, p, u)));
    }
    net.insert(net.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  const SpacePtr& space = point.space_ptr();
  const int ti = point.last_index();
  for (int i = 0; i < samples; ++i) {
    const int si = ti + static_cast<int>(rng.index(static_cast<std::size_t>(n - ti) + 1));
    const double scale = std::pow(10.0, rng.uniform(-3.0, 0.0));
    Path eta = extend_semigroup(point, grid.time(si)) + random_path(rng, space, grid, si, scale);
    if (style == NetStyle::kLatticeEndpoint) {
      const int span = static_cast<int>(std::ceil(2.0 * scale / grid.step)) + 1;
      const int k = static_cast<int>(rng.index(static_cast<std::size_t>(2 * span + 1))) - span;
      HVec target = point.back();
      target[0] += k * grid.step;
      eta = vertical_bump(eta, target - eta.back());
    }
    net.push_back(std::move(eta));
  }
  return net;
}

}  // namespace phjb
