#include "semtrace/vectormath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semtrace/error.hpp"
#include "semtrace/random.hpp"

namespace semtrace {
namespace {

template <class A, class B>
double dot_impl(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size())
    throw ValidationError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

template <class A, class B>
double cosine_impl(std::span<const A> a, std::span<const B> b) {
  const double ab = dot_impl(a, b);
  const double aa = dot_impl(a, a);
  const double bb = dot_impl(b, b);
  if (aa == 0.0 || bb == 0.0) throw ValidationError("cosine of a zero-norm vector");
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

// Sum of unit vectors plus the sum of their squared norms (≈ n).
struct UnitSum {
  std::vector<double> sum;
  double self = 0.0;
};

UnitSum unit_sum(std::span<const VectorView> set) {
  UnitSum out;
  out.sum.assign(set.front().size(), 0.0);
  std::vector<double> u(out.sum.size());
  for (const VectorView v : set) {
    if (v.size() != out.sum.size()) throw ValidationError("dimension mismatch inside vector set");
    const double n2 = dot_impl(v, v);
    if (n2 == 0.0) throw ValidationError("cosine of a zero-norm vector");
    const double inv = 1.0 / std::sqrt(n2);
    double self = 0.0;
    for (std::size_t d = 0; d < v.size(); ++d) {
      u[d] = v[d] * inv;
      self += u[d] * u[d];
    }
    for (std::size_t d = 0; d < v.size(); ++d) out.sum[d] += u[d];
    out.self += self;
  }
  return out;
}

}  // namespace

std::vector<VectorView> vector_views(const Dataset& dataset) {
  std::vector<VectorView> out;
  out.reserve(dataset.records.size());
  for (const auto& r : dataset.records) out.push_back(r.view());
  return out;
}

double dot(std::span<const float> a, std::span<const float> b) { return dot_impl(a, b); }
double dot(std::span<const float> a, std::span<const double> b) { return dot_impl(a, b); }
double dot(std::span<const double> a, std::span<const double> b) { return dot_impl(a, b); }

double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const float> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

std::vector<double> mean_vector(std::span<const VectorView> set) {
  if (set.empty()) throw ValidationError("mean of an empty vector set");
  std::vector<double> mean(set.front().size(), 0.0);
  for (const VectorView v : set) {
    if (v.size() != mean.size()) throw ValidationError("dimension mismatch inside vector set");
    for (std::size_t d = 0; d < v.size(); ++d) mean[d] += v[d];
  }
  const double n = static_cast<double>(set.size());
  for (double& x : mean) x /= n;
  return mean;
}

double aps(std::span<const VectorView> e1, std::span<const VectorView> e2) {
  if (e1.empty() || e2.empty()) throw ValidationError("APS requires two non-empty clusters");
  const UnitSum s1 = unit_sum(e1);
  const UnitSum s2 = unit_sum(e2);
  const double total = dot(std::span<const double>(s1.sum), std::span<const double>(s2.sum));
  return total / (static_cast<double>(e1.size()) * static_cast<double>(e2.size()));
}

std::optional<double> ais(std::span<const VectorView> e) {
  if (e.size() < 2) return std::nullopt;
  const UnitSum s = unit_sum(e);
  const double all = dot(std::span<const double>(s.sum), std::span<const double>(s.sum));
  const double n = static_cast<double>(e.size());
  return (all - s.self) / (n * (n - 1.0));
}

SimilaritySummary acs_isotropy(const Dataset& dataset, std::size_t n_tokens, std::size_t n_pairs,
                               std::uint64_t seed) {
  const std::size_t n = dataset.records.size();
  if (n < 2) throw ValidationError("isotropy probe needs at least 2 records");
  if (n_tokens < 2 || n_tokens % 2 != 0) throw ValidationError("n_tokens must be even and >= 2");
  if (n_pairs == 0 || n_pairs > n_tokens / 2)
    throw ValidationError("n_pairs must lie in [1, n_tokens/2]");

  Engine rng = make_stream(seed, "isotropy");
  SimilaritySummary out;
  out.with_replacement = n < n_tokens;

  std::vector<std::size_t> pool;
  if (!out.with_replacement) {
    // Partial Fisher-Yates: the first n_tokens slots are a uniform random
    // ordered sample, so consecutive slots already form random pairs.
    pool.resize(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_tokens; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
    pool.resize(n_tokens);
  } else {
    pool.resize(n_tokens);
    for (std::size_t i = 0; i < n_tokens; i += 2) {
      pool[i] = uniform_index(rng, n);
      do {
        pool[i + 1] = uniform_index(rng, n);
      } while (pool[i + 1] == pool[i]);
    }
  }

  out.counts.assign(kIsotropyBins, 0);
  out.bins.resize(kIsotropyBins + 1);
  for (std::size_t b = 0; b <= kIsotropyBins; ++b)
    out.bins[b] = -1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(kIsotropyBins);

  double sum = 0.0;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const double c = cosine(dataset.records[pool[2 * p]].view(), dataset.records[pool[2 * p + 1]].view());
    sum += c;
    auto bin = static_cast<std::size_t>((c + 1.0) * 0.5 * static_cast<double>(kIsotropyBins));
    ++out.counts[std::min(bin, kIsotropyBins - 1)];
  }
  out.n_pairs = n_pairs;
  out.mean = std::clamp(sum / static_cast<double>(n_pairs), -1.0, 1.0);
  return out;
}

}  // namespace semtrace
