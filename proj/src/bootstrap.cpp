#include "bootstrap.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "errors.hpp"
#include "rng.hpp"

namespace coarsening {

MbpConfig::MbpConfig(BoxShape s, std::uint8_t fill) : shape(std::move(s)) {
  occupied.assign(shape.size(), fill ? 1 : 0);
}

std::size_t MbpConfig::count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

bool MbpConfig::full() const { return count() == occupied.size(); }

std::string MbpConfig::to_text() const {
  SpinConfig spins(shape, BoundaryKind::Free, -1);
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    if (occupied[i]) spins.set(i, 1);
  }
  return spins.to_text();
}

MbpConfig MbpConfig::from_text(const std::string& text) {
  const SpinConfig spins = SpinConfig::from_text(text);
  MbpConfig c(spins.shape());
  for (std::size_t i = 0; i < c.occupied.size(); ++i) c.occupied[i] = spins.spin(i) > 0;
  return c;
}

namespace {

bool mbp_ready(const Topology& topo, const std::vector<std::uint8_t>& occ, std::size_t site) {
  const int d = topo.shape.dim();
  const std::int64_t* nb = topo.neighbours.data() + static_cast<std::size_t>(2 * d) * site;
  for (int a = 0; a < d; ++a) {
    const std::int64_t lo = nb[2 * a];
    const std::int64_t hi = nb[2 * a + 1];
    const bool any = (lo >= 0 && occ[static_cast<std::size_t>(lo)]) ||
                     (hi >= 0 && occ[static_cast<std::size_t>(hi)]);
    if (!any) return false;
  }
  return true;
}

// Work-queue closure for a monotone local rule. `ready(site)` reads the
// current state.
template <class Ready>
void close_with_queue(const Topology& topo, std::vector<std::uint8_t>& state, Ready ready) {
  const int deg = topo.degree();
  std::deque<std::size_t> queue;
  std::vector<std::uint8_t> queued(state.size(), 0);
  for (std::size_t s = 0; s < state.size(); ++s) {
    if (!state[s]) {
      queue.push_back(s);
      queued[s] = 1;
    }
  }
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    queued[s] = 0;
    if (state[s] || !ready(s)) continue;
    state[s] = 1;
    const std::int64_t* nb = topo.neighbours.data() + static_cast<std::size_t>(deg) * s;
    for (int k = 0; k < deg; ++k) {
      if (nb[k] < 0) continue;
      const auto y = static_cast<std::size_t>(nb[k]);
      if (!state[y] && !queued[y]) {
        queue.push_back(y);
        queued[y] = 1;
      }
    }
  }
}

}  // namespace

MbpConfig mbp_step(const MbpConfig& c) {
  const Topology topo(c.shape, BoundaryKind::Free);
  MbpConfig next = c;
  for (std::size_t s = 0; s < c.occupied.size(); ++s) {
    if (!c.occupied[s] && mbp_ready(topo, c.occupied, s)) next.occupied[s] = 1;
  }
  return next;
}

MbpConfig mbp_closure(const MbpConfig& c) {
  const Topology topo(c.shape, BoundaryKind::Free);
  MbpConfig out = c;
  close_with_queue(topo, out.occupied,
                   [&](std::size_t s) { return mbp_ready(topo, out.occupied, s); });
  return out;
}

bool internally_spans(const MbpConfig& c, const SubBox& box) {
  const int d = c.shape.dim();
  COARSENING_REQUIRE(static_cast<int>(box.lo.size()) == d && static_cast<int>(box.hi.size()) == d,
                     "internally_spans: sub-box dimension mismatch");
  for (int a = 0; a < d; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    COARSENING_REQUIRE(box.lo[ua] >= 0 && box.hi[ua] <= c.shape.sides[ua],
                       "internally_spans: sub-box outside the shape");
  }
  if (box.empty()) return true;
  std::vector<int> sides(static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < sides.size(); ++a) sides[a] = box.hi[a] - box.lo[a];
  MbpConfig sub{BoxShape(sides)};
  for (std::size_t i = 0; i < sub.occupied.size(); ++i) {
    std::vector<int> x = sub.shape.coords(i);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += box.lo[a];
    sub.occupied[i] = c.occupied[c.shape.index(x)];
  }
  return mbp_closure(sub).full();
}

MbpConfig sample_mbp(const BoxShape& shape, double theta, std::uint64_t seed) {
  COARSENING_REQUIRE(theta >= 0.0 && theta <= 1.0, "sample_mbp: theta outside [0,1]");
  MbpConfig c(shape);
  Rng rng(seed);
  for (auto& v : c.occupied) v = rng.uniform() < theta ? 1 : 0;
  return c;
}

BinomialEstimate spanning_probability(int n, double theta, int d, std::uint64_t replicas,
                                      std::uint64_t seed) {
  COARSENING_REQUIRE(theta >= 0.0 && theta <= 1.0, "spanning_probability: theta outside [0,1]");
  COARSENING_REQUIRE(replicas >= 1, "spanning_probability: replicas must be >= 1");
  const BoxShape shape = BoxShape::cube(d, n);
  std::uint64_t hits = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    if (mbp_closure(sample_mbp(shape, theta, derive_seed(seed, r))).full()) ++hits;
  }
  return wilson_interval(hits, replicas);
}

bool Rect::contains(const std::vector<int>& x) const {
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (x[a] < lo[a] || x[a] > hi[a]) return false;
  }
  return true;
}

int Rect::longest_side() const {
  int best = 0;
  for (std::size_t a = 0; a < lo.size(); ++a) best = std::max(best, hi[a] - lo[a] + 1);
  return best;
}

int l1_gap(const Rect& a, const Rect& b) {
  int gap = 0;
  for (std::size_t k = 0; k < a.lo.size(); ++k) {
    gap += std::max({0, b.lo[k] - a.hi[k], a.lo[k] - b.hi[k]});
  }
  return gap;
}

// A vertex within distance 1 of both rectangles exists exactly when their
// l1 gap is at most 2.
bool well_separated(const RectangleSet& set) {
  for (std::size_t i = 0; i < set.rects.size(); ++i) {
    for (std::size_t j = i + 1; j < set.rects.size(); ++j) {
      if (l1_gap(set.rects[i], set.rects[j]) <= 2) return false;
    }
  }
  return true;
}

SpinConfig minus_closure(const SpinConfig& field) {
  const Topology topo(field.shape(), BoundaryKind::Free);
  std::vector<std::uint8_t> minus(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) minus[i] = field.spin(i) < 0;
  const int deg = topo.degree();
  close_with_queue(topo, minus, [&](std::size_t s) {
    const std::int64_t* nb = topo.neighbours.data() + static_cast<std::size_t>(deg) * s;
    int count = 0;
    for (int k = 0; k < deg; ++k) {
      if (nb[k] >= 0 && minus[static_cast<std::size_t>(nb[k])]) ++count;
    }
    return count >= 2;
  });
  SpinConfig out = field;
  for (std::size_t i = 0; i < out.size(); ++i) out.set(i, minus[i] ? -1 : 1);
  return out;
}

RectangleSet minus_bootstrap_rectangles(const SpinConfig& field) {
  const SpinConfig closed = minus_closure(field);
  const BoxShape& shape = closed.shape();
  RectangleSet set;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    if (closed.spin(i) < 0) {
      const std::vector<int> x = shape.coords(i);
      set.rects.push_back({x, x});
    }
  }
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < set.rects.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < set.rects.size(); ++j) {
        if (l1_gap(set.rects[i], set.rects[j]) <= 2) {
          Rect& a = set.rects[i];
          const Rect& b = set.rects[j];
          for (std::size_t k = 0; k < a.lo.size(); ++k) {
            a.lo[k] = std::min(a.lo[k], b.lo[k]);
            a.hi[k] = std::max(a.hi[k], b.hi[k]);
          }
          set.rects.erase(set.rects.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
          break;
        }
      }
    }
  }
  std::sort(set.rects.begin(), set.rects.end(),
            [](const Rect& a, const Rect& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
  return set;
}

bool minus_internally_spans(const SpinConfig& field, const Rect& r) {
  const BoxShape& shape = field.shape();
  std::vector<int> sides(r.lo.size());
  for (std::size_t a = 0; a < sides.size(); ++a) {
    COARSENING_REQUIRE(r.lo[a] >= 0 && r.hi[a] < shape.sides[a] && r.lo[a] <= r.hi[a],
                       "minus_internally_spans: rectangle outside the domain");
    sides[a] = r.hi[a] - r.lo[a] + 1;
  }
  SpinConfig sub(BoxShape(sides), BoundaryKind::AllPlus, 1);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    std::vector<int> x = sub.shape().coords(i);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += r.lo[a];
    sub.set(i, field.spin(shape.index(x)));
  }
  return minus_closure(sub).all_equal(-1);
}

}  // namespace coarsening
