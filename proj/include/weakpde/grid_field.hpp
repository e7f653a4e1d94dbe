#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "weakpde/error.hpp"

namespace weakpde {

/// Uniform node-centered space-time grid. Axes are ordered space first
/// (x, then y) and time last; the time axis is the fastest-varying index
/// of the value storage.
struct GridGeometry {
  int ndim_space = 1;
  std::vector<std::size_t> shape;
  std::vector<double> spacing;
  std::vector<double> origin;

  int naxes() const noexcept { return ndim_space + 1; }
  int time_axis() const noexcept { return ndim_space; }
  std::size_t points() const noexcept;
  double extent(int axis) const { return static_cast<double>(shape.at(axis) - 1) * spacing.at(axis); }
  double coordinate(int axis, std::size_t index) const {
    return origin[axis] + static_cast<double>(index) * spacing[axis];
  }
  /// Element stride of `axis` within one component.
  std::size_t stride(int axis) const noexcept;

  /// Throws InvalidDimension / DegenerateAxis on violation.
  void validate() const;

  bool operator==(const GridGeometry&) const = default;
};

/// Sampled field with one or two components on a GridGeometry.
/// Values are component-major, then row-major over (space..., time).
class GridField {
 public:
  GridField() = default;
  GridField(GridGeometry geometry, int ncomp);

  const GridGeometry& geometry() const noexcept { return geometry_; }
  int ndim_space() const noexcept { return geometry_.ndim_space; }
  int ncomp() const noexcept { return ncomp_; }
  std::size_t points() const noexcept { return points_; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> component(int c) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(c) * points_, points_);
  }
  std::span<double> component(int c) {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(c) * points_, points_);
  }

  /// Throws NonFiniteInput if any value is NaN or infinite.
  void check_finite() const;

  bool operator==(const GridField&) const = default;

 private:
  GridGeometry geometry_;
  int ncomp_ = 0;
  std::size_t points_ = 0;
  std::vector<double> values_;
};

GridField make_grid(int ndim_space, std::vector<std::size_t> shape, std::vector<double> spacing,
                    std::vector<double> origin, int ncomp);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Adds i.i.d. N(0, sigma^2) to every entry. Entry i of the flat value array
/// receives a deviate that depends only on (seed, i), so the result is
/// independent of traversal order.
GridField add_noise(const GridField& field, const NoiseSpec& noise);

/// Keeps indices 0, s, 2s, ... on every axis; spacing is multiplied by s.
GridField subsample(const GridField& field, std::span<const std::size_t> stride);

// Binary field file: magic "WFPD", u16 version, u8 ndim_space, u8 ncomp,
// per axis {u64 shape, f64 spacing, f64 origin}, then the f64 payload.
// All little-endian.
inline constexpr std::uint16_t kFieldFormatVersion = 1;

void save_field(const GridField& field, const std::filesystem::path& path);
GridField load_field(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_field(const GridField& field);
GridField decode_field(std::span<const std::uint8_t> bytes);

/// One row per grid point: coordinates (x[, y], t) then components.
void export_csv(const GridField& field, const std::filesystem::path& path);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_atomically(const std::filesystem::path& path, std::span<const char> bytes);

}  // namespace weakpde
