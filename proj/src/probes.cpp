#include "phicurv/probes.hpp"

#include <cstdio>

namespace phicurv {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

std::vector<double> halton_point(std::uint64_t index, int dim) {
  std::vector<double> p(dim);
  for (int v = 0; v < dim; ++v) p[v] = radical_inverse(index, kPrimes[v]);
  return p;
}

std::vector<std::vector<double>> generate_probes(const Box& box, double margin,
                                                 int count, std::uint64_t seed) {
  const int dim = static_cast<int>(box.lo.size());
  std::vector<std::vector<double>> probes;
  probes.reserve(count);
  // Disjoint windows of the sequence for distinct seeds.
  const std::uint64_t start = 1 + seed * 8191u;
  for (int i = 0; i < count; ++i) {
    std::vector<double> u = halton_point(start + static_cast<std::uint64_t>(i), dim);
    std::vector<double> p(dim);
    for (int v = 0; v < dim; ++v) {
      const double lo = box.lo[v] + margin;
      const double hi = box.hi[v] - margin;
      if (!(hi > lo))
        fail(ErrorKind::ValidationError,
             "chart box is empty after applying the singular margin");
      p[v] = lo + u[v] * (hi - lo);
    }
    probes.push_back(std::move(p));
  }
  return probes;
}

void validate_probes(const std::vector<std::vector<double>>& probes,
                     const Box& box, double margin) {
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (probes[i].size() != box.lo.size())
      fail(ErrorKind::ValidationError,
           "probe " + std::to_string(i) + " has the wrong dimension");
    if (!box.contains(probes[i], margin)) {
      std::string msg = "probe " + std::to_string(i) + " = (";
      char buf[32];
      for (std::size_t v = 0; v < probes[i].size(); ++v) {
        std::snprintf(buf, sizeof buf, "%s%.6g", v ? ", " : "", probes[i][v]);
        msg += buf;
      }
      msg += ") violates the chart box or singular margin";
      fail(ErrorKind::ValidationError, msg);
    }
  }
}

}  // namespace phicurv
