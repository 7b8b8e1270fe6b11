#include "relaysec/channel_model.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "relaysec/errors.hpp"

namespace relaysec {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void FadingParams::validate() const {
  if (num_subcarriers < 1) throw Error(ErrorKind::InvalidParameter, "K must be >= 1");
  if (!(zeta > 0.0)) throw Error(ErrorKind::InvalidParameter, "zeta must be > 0");
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidParameter, "sigma must be > 0");
  if (!(rho >= 0.0)) throw Error(ErrorKind::InvalidParameter, "rho must be >= 0");
}

const char* link_name(Link link) {
  switch (link) {
    case Link::SR: return "h_sr";
    case Link::RD: return "h_rd";
    case Link::SE: return "h_se";
    case Link::RE: return "h_re";
    case Link::SI: return "h_si";
  }
  return "?";
}

const std::vector<double>& ChannelRealization::gains(Link link) const {
  switch (link) {
    case Link::SR: return h_sr;
    case Link::RD: return h_rd;
    case Link::SE: return h_se;
    case Link::RE: return h_re;
    case Link::SI: break;
  }
  return h_si;
}

std::vector<double>& ChannelRealization::gains(Link link) {
  return const_cast<std::vector<double>&>(std::as_const(*this).gains(link));
}

void ChannelRealization::validate() const {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidParameter, "sigma must be > 0");
  const std::size_t k = h_sr.size();
  for (Link link : kAllLinks) {
    const auto& g = gains(link);
    if (g.size() != k)
      throw Error(ErrorKind::LengthMismatch, std::string(link_name(link)) + " has a different length than h_sr");
    for (double v : g)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::InvalidParameter, std::string(link_name(link)) + " contains a negative or non-finite gain");
  }
}

Point2 place_eavesdropper(const Geometry& geometry) {
  const double ratio = geometry.ratio_sr_se;
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw Error(ErrorKind::InfeasibleGeometry, "ratio d_SR/d_SE must be positive");
  if (ratio > 2.0)
    throw Error(ErrorKind::InfeasibleGeometry,
                "ratio d_SR/d_SE = " + std::to_string(ratio) + " exceeds 2; d_SE would be below d_SR/2");
  const Point2& s = geometry.source;
  const Point2& r = geometry.relay;
  const double d_sr = distance(s, r);
  if (d_sr == 0.0) throw Error(ErrorKind::DegenerateDistance, "source and relay coincide");

  const double d_se = d_sr / ratio;
  const double half = 0.5 * d_sr;
  const double y = std::sqrt(std::max(0.0, d_se * d_se - half * half));
  const double ux = (r.x - s.x) / d_sr;
  const double uy = (r.y - s.y) / d_sr;
  const Point2 mid{0.5 * (s.x + r.x), 0.5 * (s.y + r.y)};
  return {mid.x - uy * y, mid.y + ux * y};
}

double mean_gain(double distance, double zeta) {
  if (!(distance > 0.0)) throw Error(ErrorKind::DegenerateDistance, "distance must be > 0");
  return std::pow(distance, -zeta);
}

LinkMeans link_means(const Geometry& geometry, const FadingParams& params) {
  place_eavesdropper(geometry);  // feasibility check only
  const double d_sr = distance(geometry.source, geometry.relay);
  // d_SE = d_RE = d_SR / ratio exactly; no need to round-trip through E.
  const double d_se = d_sr / geometry.ratio_sr_se;
  return LinkMeans{
      mean_gain(d_sr, params.zeta),
      mean_gain(distance(geometry.relay, geometry.destination), params.zeta),
      mean_gain(d_se, params.zeta),
      mean_gain(d_se, params.zeta),
      params.rho,
  };
}

double keyed_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t link, std::uint64_t subcarrier) {
  std::uint64_t x = splitmix64(seed);
  x = splitmix64(x ^ (trial * kGolden));
  x = splitmix64(x ^ ((link + 1) * 0xD6E8FEB86659FD93ULL));
  x = splitmix64(x ^ ((subcarrier + 1) * 0xA0761D6478BD642FULL));
  // 53 random bits, shifted off zero.
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

ChannelRealization sample_realization(const Geometry& geometry, const FadingParams& params,
                                      std::uint64_t trial_index) {
  params.validate();
  if (trial_index >= (std::uint64_t{1} << 63))
    throw Error(ErrorKind::InvalidParameter, "trial_index must be < 2^63");
  const LinkMeans means = link_means(geometry, params);
  const std::size_t k_count = params.num_subcarriers;

  ChannelRealization h;
  h.sigma = params.sigma;
  const double mean_of[5] = {means.sr, means.rd, means.se, means.re, means.si};
  for (Link link : kAllLinks) {
    auto& g = h.gains(link);
    g.assign(k_count, 0.0);
    const double mean = mean_of[static_cast<int>(link)];
    if (mean == 0.0) continue;
    for (std::size_t k = 0; k < k_count; ++k) {
      const double u = keyed_uniform(params.seed, trial_index, static_cast<std::uint64_t>(link), k);
      g[k] = -mean * std::log(u);
    }
  }
  return h;
}

}  // namespace relaysec
