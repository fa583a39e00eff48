#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "stats.hpp"

namespace coarsening {

struct MbpConfig {
  BoxShape shape;
  std::vector<std::uint8_t> occupied;

  explicit MbpConfig(BoxShape s, std::uint8_t fill = 0);
  std::size_t count() const;
  bool full() const;
  bool operator==(const MbpConfig&) const = default;

  /// Text form shared with SpinConfig: occupied is '+', vacant is '-'.
  std::string to_text() const;
  static MbpConfig from_text(const std::string& text);
};

/// One synchronous step: a vacant site becomes occupied when every axis has
/// an occupied neighbour on at least one side. Outside sites are vacant.
MbpConfig mbp_step(const MbpConfig& c);

MbpConfig mbp_closure(const MbpConfig& c);

/// Closure of c restricted to `box` (vacant outside) covers `box`.
bool internally_spans(const MbpConfig& c, const SubBox& box);

MbpConfig sample_mbp(const BoxShape& shape, double theta, std::uint64_t seed);

BinomialEstimate spanning_probability(int n, double theta, int d, std::uint64_t replicas,
                                      std::uint64_t seed);

/// Closed integer rectangle [lo, hi] per axis.
struct Rect {
  std::vector<int> lo;
  std::vector<int> hi;
  bool contains(const std::vector<int>& x) const;
  int longest_side() const;
  bool operator==(const Rect&) const = default;
};

struct RectangleSet {
  std::vector<Rect> rects;
};

/// l1 distance between two rectangles.
int l1_gap(const Rect& a, const Rect& b);

/// True when no vertex lies within l1 distance 1 of two rectangles.
bool well_separated(const RectangleSet& set);

/// Threshold-two closure of the -1 sites: a +1 site turns -1 when at least
/// two of its neighbours are -1. Sites outside the domain are +1.
SpinConfig minus_closure(const SpinConfig& field);

/// Rectangles covering the -1 sites of minus_closure(field), merged until
/// well separated.
RectangleSet minus_bootstrap_rectangles(const SpinConfig& field);

/// Closure of field restricted to `r` (+1 outside r) turns all of r to -1.
bool minus_internally_spans(const SpinConfig& field, const Rect& r);

}  // namespace coarsening
