#include "semtrace/wsi.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "semtrace/error.hpp"
#include "semtrace/random.hpp"
#include "semtrace/vectormath.hpp"

namespace semtrace {
namespace {

// Row-major copy of the dataset vectors, shared read-only by all restarts.
struct Points {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  explicit Points(const Dataset& ds) : n(ds.size()), dim(ds.dim), data(ds.size() * ds.dim) {
    for (std::size_t i = 0; i < n; ++i) std::copy(ds.records[i].vector.begin(), ds.records[i].vector.end(),
                                                  data.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  const float* row(std::size_t i) const { return data.data() + i * dim; }
};

double squared_distance(const float* x, const double* c, std::size_t dim) {
  double s = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    const double diff = static_cast<double>(x[d]) - c[d];
    s += diff * diff;
  }
  return s;
}

class Lloyd {
 public:
  Lloyd(const Points& pts, std::size_t k) : pts_(pts), k_(k), centroids_(k * pts.dim), assign_(pts.n), dist_(pts.n) {}

  void init_forgy(Engine& rng) {
    std::vector<std::size_t> idx(pts_.n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t c = 0; c < k_; ++c) {
      std::swap(idx[c], idx[c + uniform_index(rng, pts_.n - c)]);
      set_centroid(c, idx[c]);
    }
  }

  void init_plus_plus(Engine& rng) {
    std::vector<double> d2(pts_.n, std::numeric_limits<double>::infinity());
    std::vector<bool> chosen(pts_.n, false);
    std::size_t pick = uniform_index(rng, pts_.n);
    for (std::size_t c = 0;; ++c) {
      set_centroid(c, pick);
      chosen[pick] = true;
      if (c + 1 == k_) break;
      double total = 0.0;
      for (std::size_t i = 0; i < pts_.n; ++i) {
        d2[i] = std::min(d2[i], squared_distance(pts_.row(i), centroid(c), pts_.dim));
        total += d2[i];
      }
      if (total > 0.0) {
        const double target = uniform_unit(rng) * total;
        double acc = 0.0;
        pick = pts_.n - 1;
        for (std::size_t i = 0; i < pts_.n; ++i) {
          acc += d2[i];
          if (acc > target && d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < pts_.n; ++i)
          if (!chosen[i]) rest.push_back(i);
        pick = rest[uniform_index(rng, rest.size())];
      }
    }
  }

  // Nearest-centroid assignment (ties: lowest index). Returns whether any
  // record changed cluster.
  bool assign(bool first) {
    bool changed = first;
    for (std::size_t i = 0; i < pts_.n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(pts_.row(i), centroid(0), pts_.dim);
      for (std::size_t c = 1; c < k_; ++c) {
        const double d = squared_distance(pts_.row(i), centroid(c), pts_.dim);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (!first && assign_[i] != best) changed = true;
      assign_[i] = best;
      dist_[i] = best_d;
    }
    return changed;
  }

  // Moves a centroid onto the farthest record of any cluster that can spare
  // one, for every empty cluster. Never increases inertia.
  bool repair_empty() {
    std::vector<std::size_t> sizes(k_, 0);
    for (std::size_t a : assign_) ++sizes[a];
    bool repaired = false;
    for (std::size_t c = 0; c < k_; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = pts_.n;
      for (std::size_t i = 0; i < pts_.n; ++i)
        if (sizes[assign_[i]] >= 2 && (far == pts_.n || dist_[i] > dist_[far])) far = i;
      --sizes[assign_[far]];
      ++sizes[c];
      set_centroid(c, far);
      assign_[far] = c;
      dist_[far] = 0.0;
      repaired = true;
    }
    return repaired;
  }

  // Centroids become the means of their clusters; returns the largest shift.
  double update() {
    std::vector<double> sums(k_ * pts_.dim, 0.0);
    std::vector<std::size_t> counts(k_, 0);
    for (std::size_t i = 0; i < pts_.n; ++i) {
      double* s = sums.data() + assign_[i] * pts_.dim;
      const float* x = pts_.row(i);
      for (std::size_t d = 0; d < pts_.dim; ++d) s[d] += x[d];
      ++counts[assign_[i]];
    }
    double max_shift = 0.0;
    for (std::size_t c = 0; c < k_; ++c) {
      if (counts[c] == 0) continue;
      double shift = 0.0;
      for (std::size_t d = 0; d < pts_.dim; ++d) {
        const double m = sums[c * pts_.dim + d] / static_cast<double>(counts[c]);
        const double diff = m - centroids_[c * pts_.dim + d];
        shift += diff * diff;
        centroids_[c * pts_.dim + d] = m;
      }
      max_shift = std::max(max_shift, std::sqrt(shift));
    }
    return max_shift;
  }

  double inertia() const { return std::accumulate(dist_.begin(), dist_.end(), 0.0); }

  ClusteringSolution run(std::uint64_t seed, const KMeansOptions& opt) {
    Engine rng = make_stream(seed, "kmeans/init");
    if (opt.init == InitMethod::forgy) init_forgy(rng); else init_plus_plus(rng);

    ClusteringSolution sol;
    sol.k = k_;
    sol.seed = seed;
    assign(true);
    repair_empty();
    sol.inertia_trace.push_back(inertia());
    for (int iter = 1; iter <= opt.max_iter; ++iter) {
      const double shift = update();
      const bool changed = assign(false);
      const bool repaired = repair_empty();
      sol.inertia_trace.push_back(inertia());
      sol.iterations = iter;
      if (!repaired && (!changed || shift < opt.tol)) {
        sol.converged = true;
        break;
      }
    }
    sol.inertia = inertia();
    sol.assignment = assign_;
    sol.centroids.resize(k_);
    for (std::size_t c = 0; c < k_; ++c)
      sol.centroids[c].assign(centroid(c), centroid(c) + pts_.dim);
    return sol;
  }

 private:
  const double* centroid(std::size_t c) const { return centroids_.data() + c * pts_.dim; }
  void set_centroid(std::size_t c, std::size_t i) {
    std::copy(pts_.row(i), pts_.row(i) + pts_.dim, centroids_.begin() + static_cast<std::ptrdiff_t>(c * pts_.dim));
  }

  const Points& pts_;
  std::size_t k_;
  std::vector<double> centroids_;
  std::vector<std::size_t> assign_;
  std::vector<double> dist_;
};

void check_k(const Dataset& records, std::size_t k) {
  if (k < 2) throw ValidationError("k must be at least 2");
  if (k > records.size())
    throw ValidationError("k = " + std::to_string(k) + " exceeds dataset size " + std::to_string(records.size()));
}

std::vector<std::string> ids_of(const Dataset& records) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records.records) ids.push_back(r.occurrence_id);
  return ids;
}

std::vector<std::vector<VectorView>> members_by_cluster(const ClusteringSolution& solution, const Dataset& records) {
  const auto assignment = solution.assignment_for(records);
  std::vector<std::vector<VectorView>> members(solution.k);
  for (std::size_t i = 0; i < records.size(); ++i) members[assignment[i]].push_back(records.records[i].view());
  return members;
}

std::string ascii_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::vector<std::size_t> ClusteringSolution::sizes() const {
  std::vector<std::size_t> out(k, 0);
  for (std::size_t a : assignment) ++out.at(a);
  return out;
}

std::vector<std::size_t> ClusteringSolution::assignment_for(const Dataset& dataset) const {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(occurrence_ids.size());
  for (std::size_t i = 0; i < occurrence_ids.size(); ++i) index.emplace(occurrence_ids[i], assignment[i]);
  std::vector<std::size_t> out;
  out.reserve(dataset.size());
  for (const auto& r : dataset.records) {
    auto it = index.find(r.occurrence_id);
    if (it == index.end())
      throw ValidationError("record \"" + r.occurrence_id + "\" is not covered by the clustering solution");
    if (it->second >= k) throw ValidationError("assignment of \"" + r.occurrence_id + "\" is out of range");
    out.push_back(it->second);
  }
  return out;
}

ClusteringSolution kmeans(const Dataset& records, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  check_k(records, k);
  const Points pts(records);
  ClusteringSolution sol = Lloyd(pts, k).run(seed, options);
  sol.occurrence_ids = ids_of(records);
  return sol;
}

RestartResult best_of(const Dataset& records, std::size_t k, std::size_t n_restarts, std::uint64_t base_seed,
                      const KMeansOptions& options, unsigned threads) {
  if (n_restarts < 1) throw ValidationError("need at least one restart");
  check_k(records, k);
  const Points pts(records);

  std::vector<ClusteringSolution> runs(n_restarts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < n_restarts; r = next++) runs[r] = Lloyd(pts, k).run(base_seed + r, options);
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_restarts));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  RestartResult result;
  result.base_seed = base_seed;
  std::size_t best = 0;
  for (std::size_t r = 0; r < n_restarts; ++r) {
    result.restart_inertia.push_back(runs[r].inertia);
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  result.best = std::move(runs[best]);
  result.best.occurrence_ids = ids_of(records);
  return result;
}

StopWords StopWords::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stop-word list " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    words.insert(ascii_lower(line.substr(b, e - b + 1)));
  }
  return StopWords(std::move(words));
}

std::vector<ClusterProfile> profile_clusters(const ClusteringSolution& solution, const Dataset& records,
                                             const std::map<std::string, int>& rank_of,
                                             const StopWords& stop_words, std::size_t n_neighbors) {
  const auto assignment = solution.assignment_for(records);
  std::vector<ClusterProfile> profiles(solution.k);
  std::vector<std::map<std::string, std::size_t>> labels(solution.k);
  std::vector<std::map<std::string, std::size_t>> words(solution.k);
  std::vector<std::vector<VectorView>> members(solution.k);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records.records[i];
    const std::size_t c = assignment[i];
    members[c].push_back(r.view());
    if (r.label) ++labels[c][*r.label];
    if (r.context_tokens)
      for (const auto& tok : *r.context_tokens) {
        std::string w = ascii_lower(tok);
        if (!w.empty() && !stop_words.contains(w)) ++words[c][w];
      }
  }

  auto rank = [&](const std::string& label) {
    auto it = rank_of.find(label);
    return it == rank_of.end() ? std::numeric_limits<int>::max() : it->second;
  };

  for (std::size_t c = 0; c < solution.k; ++c) {
    ClusterProfile& p = profiles[c];
    p.cluster = c;
    p.size = members[c].size();
    p.ais = ais(members[c]);

    const std::pair<const std::string, std::size_t>* best = nullptr;
    for (const auto& entry : labels[c]) {
      // Map iteration is lexicographic, so only strictly better entries win.
      if (!best || entry.second > best->second ||
          (entry.second == best->second && rank(entry.first) < rank(best->first)))
        best = &entry;
    }
    if (best) {
      p.dominant_label = best->first;
      if (auto it = rank_of.find(best->first); it != rank_of.end()) p.dominant_rank = it->second;
    }

    std::vector<NeighborCount> counts;
    for (const auto& [w, n] : words[c]) counts.push_back({w, n});
    std::stable_sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
    if (counts.size() > n_neighbors) counts.resize(n_neighbors);
    p.top_neighbors = std::move(counts);
  }
  return profiles;
}

std::vector<std::size_t> order_by_size(std::span<const std::size_t> sizes) {
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
  return order;
}

std::string permutation_string(std::span<const ClusterProfile> profiles) {
  std::vector<std::size_t> sizes;
  for (const auto& p : profiles) sizes.push_back(p.size);
  std::string out;
  for (std::size_t c : order_by_size(sizes)) {
    const auto& p = profiles[c];
    out += p.dominant_rank ? std::to_string(*p.dominant_rank) : std::string("?");
  }
  return out;
}

Heatmap heatmap_data(const ClusteringSolution& solution, const Dataset& records) {
  if (solution.k < 2) throw ValidationError("heatmap needs at least 2 clusters");
  const auto members = members_by_cluster(solution, records);
  std::vector<std::size_t> sizes;
  for (const auto& m : members) {
    if (m.empty()) throw ValidationError("heatmap requires every cluster to have members");
    sizes.push_back(m.size());
  }

  Heatmap h;
  h.order = order_by_size(sizes);
  const std::size_t k = solution.k;
  h.matrix.assign(k, std::vector<double>(k, 0.0));
  h.insufficient.assign(k, false);
  for (std::size_t a = 0; a < k; ++a) {
    h.sizes.push_back(sizes[h.order[a]]);
    const auto inner = ais(members[h.order[a]]);
    h.insufficient[a] = !inner.has_value();
    h.matrix[a][a] = inner.value_or(std::numeric_limits<double>::quiet_NaN());
    for (std::size_t b = a + 1; b < k; ++b)
      h.matrix[a][b] = h.matrix[b][a] = aps(members[h.order[a]], members[h.order[b]]);
  }

  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t a = 0; a < k; ++a) {
    if (h.insufficient[a]) continue;
    double off = 0.0;
    for (std::size_t b = 0; b < k; ++b)
      if (b != a) off += h.matrix[a][b];
    total += h.matrix[a][a] - off / static_cast<double>(k - 1);
    ++used;
  }
  if (used > 0) h.mean_ais_minus_aps = total / static_cast<double>(used);
  return h;
}

}  // namespace semtrace
