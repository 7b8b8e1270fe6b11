#pragma once

// Network geometry, path-loss and Rayleigh block-fading channel generation.
//
// Power gains are drawn as Exponential(mean d^-zeta), i.e. the squared
// magnitude of a CN(0, d^-zeta) coefficient. Every draw is a pure function of
// (seed, trial, link, subcarrier) so trials can be generated in any order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace relaysec {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point2& a, const Point2& b);

struct Geometry {
  Point2 source{0.0, 0.0};
  Point2 relay{1.0, 0.0};
  Point2 destination{2.0, 0.0};
  // d_SR / d_SE; feasible placements require a value in (0, 2].
  double ratio_sr_se = 1.0;
};

struct FadingParams {
  std::size_t num_subcarriers = 16;
  double zeta = 4.0;   // path-loss exponent
  double sigma = 1.0;  // noise power (linear)
  double rho = 0.0;    // mean self-interference power gain
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Link : std::uint8_t { SR = 0, RD = 1, SE = 2, RE = 3, SI = 4 };
inline constexpr std::array<Link, 5> kAllLinks{Link::SR, Link::RD, Link::SE, Link::RE, Link::SI};
const char* link_name(Link link);

struct ChannelRealization {
  std::vector<double> h_sr, h_rd, h_se, h_re, h_si;
  double sigma = 1.0;

  std::size_t size() const { return h_sr.size(); }

  // Throws LengthMismatch / InvalidParameter on broken invariants.
  void validate() const;

  const std::vector<double>& gains(Link link) const;
  std::vector<double>& gains(Link link);
};

// Eavesdropper on the perpendicular bisector of S-R (y >= 0 side of the
// S->R direction) with d_SE = d_RE = d_SR / ratio.
Point2 place_eavesdropper(const Geometry& geometry);

double mean_gain(double distance, double zeta);

// Mean power gain of every link for the given geometry. SI is rho.
struct LinkMeans {
  double sr, rd, se, re, si;
};
LinkMeans link_means(const Geometry& geometry, const FadingParams& params);

// Counter-based uniform in (0, 1), keyed by the four indices.
double keyed_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t link, std::uint64_t subcarrier);

ChannelRealization sample_realization(const Geometry& geometry, const FadingParams& params,
                                      std::uint64_t trial_index);

}  // namespace relaysec
