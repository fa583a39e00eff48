#include "lattice.hpp"

#include <algorithm>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace coarsening {

BoxShape::BoxShape(std::vector<int> s) : sides(std::move(s)) {
  COARSENING_REQUIRE(!sides.empty(), "BoxShape: dimension must be >= 1");
  std::size_t total = 1;
  for (int n : sides) {
    COARSENING_REQUIRE(n >= 1, "BoxShape: every side must be >= 1");
    COARSENING_REQUIRE(total <= kMaxSites / static_cast<std::size_t>(n),
                       "BoxShape: site count exceeds the supported limit");
    total *= static_cast<std::size_t>(n);
  }
}

BoxShape BoxShape::cube(int dim, int n) {
  COARSENING_REQUIRE(dim >= 1, "BoxShape: dimension must be >= 1");
  return BoxShape(std::vector<int>(static_cast<std::size_t>(dim), n));
}

std::size_t BoxShape::size() const {
  std::size_t total = 1;
  for (int n : sides) total *= static_cast<std::size_t>(n);
  return total;
}

bool BoxShape::contains(const std::vector<int>& x) const {
  if (x.size() != sides.size()) return false;
  for (std::size_t a = 0; a < sides.size(); ++a) {
    if (x[a] < 0 || x[a] >= sides[a]) return false;
  }
  return true;
}

std::size_t BoxShape::index(const std::vector<int>& x) const {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < sides.size(); ++a) {
    idx = idx * static_cast<std::size_t>(sides[a]) + static_cast<std::size_t>(x[a]);
  }
  return idx;
}

std::vector<int> BoxShape::coords(std::size_t index) const {
  std::vector<int> x(sides.size());
  for (std::size_t a = sides.size(); a-- > 0;) {
    const auto n = static_cast<std::size_t>(sides[a]);
    x[a] = static_cast<int>(index % n);
    index /= n;
  }
  return x;
}

const char* to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::AllPlus: return "AllPlus";
    case BoundaryKind::AllMinus: return "AllMinus";
    case BoundaryKind::Quadrant: return "Quadrant";
    case BoundaryKind::Free: return "Free";
  }
  return "?";
}

BoundaryKind parse_boundary(const std::string& text) {
  if (text == "AllPlus") return BoundaryKind::AllPlus;
  if (text == "AllMinus") return BoundaryKind::AllMinus;
  if (text == "Quadrant") return BoundaryKind::Quadrant;
  if (text == "Free") return BoundaryKind::Free;
  throw InputError("unknown boundary kind '" + text + "'");
}

bool SubBox::empty() const {
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (hi[a] <= lo[a]) return true;
  }
  return false;
}

int boundary_spin(BoundaryKind kind, const std::vector<int>& y) {
  switch (kind) {
    case BoundaryKind::AllPlus: return 1;
    case BoundaryKind::AllMinus: return -1;
    case BoundaryKind::Quadrant: return (y[0] >= 1 && y[1] >= 1) ? -1 : 1;
    case BoundaryKind::Free: return 0;
  }
  return 0;
}

Topology::Topology(BoxShape s, BoundaryKind b) : shape(std::move(s)), boundary(b) {
  COARSENING_REQUIRE(boundary != BoundaryKind::Quadrant || shape.dim() == 2,
                     "Quadrant boundary requires d = 2");
  const int d = shape.dim();
  const std::size_t n = shape.size();
  neighbours.resize(n * static_cast<std::size_t>(2 * d));
  std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
  for (int a = d - 2; a >= 0; --a) {
    stride[static_cast<std::size_t>(a)] =
        stride[static_cast<std::size_t>(a) + 1] * static_cast<std::size_t>(shape.sides[static_cast<std::size_t>(a) + 1]);
  }
  std::vector<int> x(static_cast<std::size_t>(d), 0);
  for (std::size_t site = 0; site < n; ++site) {
    for (int a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      for (int dir = 0; dir < 2; ++dir) {
        const int step = dir == 0 ? -1 : 1;
        const int ya = x[ua] + step;
        std::int64_t code;
        if (ya >= 0 && ya < shape.sides[ua]) {
          code = static_cast<std::int64_t>(dir == 0 ? site - stride[ua] : site + stride[ua]);
        } else {
          std::vector<int> y = x;
          y[ua] = ya;
          const int s = boundary_spin(boundary, y);
          code = s > 0 ? kOutsidePlus : (s < 0 ? kOutsideMinus : kOutsideFree);
        }
        neighbours[site * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(2 * a + dir)] = code;
      }
    }
    for (int a = d - 1; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      if (++x[ua] < shape.sides[ua]) break;
      x[ua] = 0;
    }
  }
}

SpinConfig::SpinConfig(BoxShape shape, BoundaryKind boundary, int fill)
    : topo_(std::make_shared<const Topology>(std::move(shape), boundary)) {
  COARSENING_REQUIRE(fill == 1 || fill == -1, "SpinConfig: spins must be -1 or +1");
  spins_.assign(topo_->shape.size(), static_cast<std::int8_t>(fill));
}

void SpinConfig::set(std::size_t site, int value) {
  COARSENING_REQUIRE(site < spins_.size(), "SpinConfig::set: site outside the box");
  COARSENING_REQUIRE(value == 1 || value == -1, "SpinConfig::set: spins must be -1 or +1");
  spins_[site] = static_cast<std::int8_t>(value);
}

int SpinConfig::local_energy(const std::vector<int>& x) const {
  COARSENING_REQUIRE(shape().contains(x), "local_energy: site outside the box");
  return local_energy(shape().index(x));
}

std::size_t SpinConfig::count_plus() const {
  return static_cast<std::size_t>(std::count(spins_.begin(), spins_.end(), std::int8_t{1}));
}

bool SpinConfig::all_equal(int value) const {
  return std::all_of(spins_.begin(), spins_.end(),
                     [value](std::int8_t s) { return s == value; });
}

std::string SpinConfig::to_text() const {
  std::ostringstream out;
  out << "d=" << shape().dim() << " sides=";
  for (int a = 0; a < shape().dim(); ++a) {
    out << (a ? "," : "") << shape().sides[static_cast<std::size_t>(a)];
  }
  out << " boundary=" << to_string(boundary()) << '\n';
  const auto row = static_cast<std::size_t>(shape().sides.back());
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    out << (spins_[i] > 0 ? '+' : '-');
    if ((i + 1) % row == 0) out << '\n';
  }
  return out.str();
}

SpinConfig SpinConfig::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  int d = 0;
  std::string sides_text, boundary_text;
  {
    std::istringstream h(header);
    std::string tok;
    while (h >> tok) {
      if (tok.rfind("d=", 0) == 0) {
        d = std::stoi(tok.substr(2));
      } else if (tok.rfind("sides=", 0) == 0) {
        sides_text = tok.substr(6);
      } else if (tok.rfind("boundary=", 0) == 0) {
        boundary_text = tok.substr(9);
      } else {
        throw InputError("config header: unexpected token '" + tok + "'");
      }
    }
  }
  std::vector<int> sides;
  {
    std::istringstream s(sides_text);
    std::string part;
    while (std::getline(s, part, ',')) sides.push_back(std::stoi(part));
  }
  COARSENING_REQUIRE(d >= 1 && static_cast<int>(sides.size()) == d,
                     "config header: dimension and sides disagree");
  SpinConfig config(BoxShape(sides), parse_boundary(boundary_text));
  std::size_t site = 0;
  std::string line;
  while (std::getline(in, line)) {
    for (char c : line) {
      if (c == '\r') continue;
      COARSENING_REQUIRE(c == '+' || c == '-', "config body: expected '+' or '-'");
      COARSENING_REQUIRE(site < config.size(), "config body: too many spins");
      config.spins_[site++] = static_cast<std::int8_t>(c == '+' ? 1 : -1);
    }
  }
  COARSENING_REQUIRE(site == config.size(), "config body: too few spins");
  return config;
}

bool SpinConfig::operator==(const SpinConfig& other) const {
  return shape() == other.shape() && boundary() == other.boundary() && spins_ == other.spins_;
}

SpinConfig fill_box(SpinConfig config, const SubBox& box, int value) {
  const BoxShape& shape = config.shape();
  COARSENING_REQUIRE(box.lo.size() == shape.sides.size() && box.hi.size() == shape.sides.size(),
                     "fill_box: sub-box dimension mismatch");
  COARSENING_REQUIRE(value == 1 || value == -1, "fill_box: value must be -1 or +1");
  if (box.empty()) return config;
  for (std::size_t a = 0; a < shape.sides.size(); ++a) {
    COARSENING_REQUIRE(box.lo[a] >= 0 && box.hi[a] <= shape.sides[a],
                       "fill_box: sub-box outside the shape");
  }
  std::vector<int> x = box.lo;
  while (true) {
    config.set(shape.index(x), value);
    std::size_t a = x.size();
    while (a-- > 0) {
      if (++x[a] < box.hi[a]) break;
      x[a] = box.lo[a];
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return config;
}

SpinConfig sample_product_config(const BoxShape& shape, double p, BoundaryKind boundary,
                                 std::uint64_t seed) {
  COARSENING_REQUIRE(p >= 0.0 && p <= 1.0, "sample_product_config: p outside [0,1]");
  SpinConfig config(shape, boundary, -1);
  Rng rng(seed);
  for (std::size_t i = 0; i < config.size(); ++i) {
    if (rng.uniform() < p) config.set(i, 1);
  }
  return config;
}

SpinConfig quadrant_config(int n) {
  COARSENING_REQUIRE(n >= 2, "quadrant_config: side must be >= 2");
  SpinConfig config(BoxShape::cube(2, n), BoundaryKind::Quadrant, 1);
  return fill_box(std::move(config), SubBox{{1, 1}, {n, n}}, -1);
}

}  // namespace coarsening
