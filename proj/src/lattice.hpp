#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace coarsening {

/// Largest supported site count. Site indices are stored as int64 in the
/// neighbour table and spins take one byte each.
inline constexpr std::size_t kMaxSites = std::size_t{1} << 31;

struct BoxShape {
  std::vector<int> sides;

  BoxShape() = default;
  explicit BoxShape(std::vector<int> s);
  static BoxShape cube(int dim, int n);

  int dim() const { return static_cast<int>(sides.size()); }
  std::size_t size() const;
  bool contains(const std::vector<int>& x) const;
  /// Row-major, last axis fastest: index = ((x0*n1 + x1)*n2 + x2)...
  std::size_t index(const std::vector<int>& x) const;
  std::vector<int> coords(std::size_t index) const;
  bool operator==(const BoxShape&) const = default;
};

enum class BoundaryKind { AllPlus, AllMinus, Quadrant, Free };

const char* to_string(BoundaryKind kind);
BoundaryKind parse_boundary(const std::string& text);

/// Half-open sub-box [lo, hi) per axis. Empty when any hi <= lo.
struct SubBox {
  std::vector<int> lo;
  std::vector<int> hi;
  bool empty() const;
};

/// Neighbour codes stored in the table for sites outside the box.
inline constexpr std::int64_t kOutsidePlus = -1;
inline constexpr std::int64_t kOutsideMinus = -2;
inline constexpr std::int64_t kOutsideFree = -3;

/// Precomputed neighbour table for a shape and boundary. Entry 2d*site + 2a
/// is the neighbour at -e_a, entry 2d*site + 2a + 1 the one at +e_a.
struct Topology {
  BoxShape shape;
  BoundaryKind boundary;
  std::vector<std::int64_t> neighbours;

  Topology(BoxShape shape, BoundaryKind boundary);
  int degree() const { return 2 * shape.dim(); }
};

class SpinConfig {
 public:
  SpinConfig(BoxShape shape, BoundaryKind boundary, int fill = +1);

  const BoxShape& shape() const { return topo_->shape; }
  BoundaryKind boundary() const { return topo_->boundary; }
  const Topology& topology() const { return *topo_; }
  std::size_t size() const { return spins_.size(); }

  int spin(std::size_t site) const { return spins_[site]; }
  void set(std::size_t site, int value);
  const std::vector<std::int8_t>& spins() const { return spins_; }

  /// Sum of neighbouring spins including boundary spins. Free neighbours add 0.
  int neighbour_sum(std::size_t site) const {
    const int deg = topo_->degree();
    const std::int64_t* nb = topo_->neighbours.data() + static_cast<std::size_t>(deg) * site;
    int sum = 0;
    for (int k = 0; k < deg; ++k) {
      const std::int64_t y = nb[k];
      if (y >= 0) {
        sum += spins_[static_cast<std::size_t>(y)];
      } else if (y == kOutsidePlus) {
        sum += 1;
      } else if (y == kOutsideMinus) {
        sum -= 1;
      }
    }
    return sum;
  }

  /// e_x = -sum_{y~x} sigma_x sigma_y.
  int local_energy(std::size_t site) const { return -spins_[site] * neighbour_sum(site); }
  int local_energy(const std::vector<int>& x) const;

  std::size_t count_plus() const;
  bool all_equal(int value) const;

  std::string to_text() const;
  static SpinConfig from_text(const std::string& text);

  bool operator==(const SpinConfig& other) const;

 private:
  std::shared_ptr<const Topology> topo_;
  std::vector<std::int8_t> spins_;
};

/// Spin of the virtual exterior site y under `kind`. Only meaningful for y
/// outside the box; Free returns 0.
int boundary_spin(BoundaryKind kind, const std::vector<int>& y);

SpinConfig fill_box(SpinConfig config, const SubBox& box, int value);

SpinConfig sample_product_config(const BoxShape& shape, double p, BoundaryKind boundary,
                                 std::uint64_t seed);

/// The d=2 quadrant initial state on [0,n-1]^2: -1 where both coordinates are >= 1.
SpinConfig quadrant_config(int n);

}  // namespace coarsening
