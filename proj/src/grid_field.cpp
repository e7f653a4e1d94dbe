#include "weakpde/grid_field.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "weakpde/error.hpp"
#include "weakpde/random.hpp"

namespace weakpde {

namespace {

constexpr char kMagic[4] = {'W', 'F', 'P', 'D'};

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    static_assert(sizeof(T) == 8);
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <class T>
  T get(ErrorCode on_short) {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error(on_short, "unexpected end of field data");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    if constexpr (std::is_floating_point_v<T>) {
      return std::bit_cast<double>(bits);
    } else {
      return static_cast<T>(bits);
    }
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t GridGeometry::points() const noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t GridGeometry::stride(int axis) const noexcept {
  std::size_t s = 1;
  for (int a = naxes() - 1; a > axis; --a) s *= shape[a];
  return s;
}

void GridGeometry::validate() const {
  if (ndim_space != 1 && ndim_space != 2)
    throw Error(ErrorCode::InvalidDimension, "ndim_space must be 1 or 2, got " + std::to_string(ndim_space));
  const auto n = static_cast<std::size_t>(naxes());
  if (shape.size() != n || spacing.size() != n || origin.size() != n)
    throw Error(ErrorCode::InvalidDimension, "shape/spacing/origin must have ndim_space + 1 entries");
  for (std::size_t a = 0; a < n; ++a) {
    if (shape[a] < 2) throw Error(ErrorCode::DegenerateAxis, "axis " + std::to_string(a) + " has fewer than 2 samples");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw Error(ErrorCode::DegenerateAxis, "axis " + std::to_string(a) + " spacing must be positive");
    if (!std::isfinite(origin[a])) throw Error(ErrorCode::DegenerateAxis, "non-finite origin");
  }
}

GridField::GridField(GridGeometry geometry, int ncomp) : geometry_(std::move(geometry)), ncomp_(ncomp) {
  geometry_.validate();
  if (ncomp != 1 && ncomp != 2) throw Error(ErrorCode::InvalidDimension, "ncomp must be 1 or 2");
  points_ = geometry_.points();
  values_.assign(points_ * static_cast<std::size_t>(ncomp_), 0.0);
}

void GridField::check_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "field contains non-finite values");
}

GridField make_grid(int ndim_space, std::vector<std::size_t> shape, std::vector<double> spacing,
                    std::vector<double> origin, int ncomp) {
  return GridField(GridGeometry{ndim_space, std::move(shape), std::move(spacing), std::move(origin)}, ncomp);
}

GridField add_noise(const GridField& field, const NoiseSpec& noise) {
  if (!(noise.sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  GridField out = field;
  if (noise.sigma == 0.0) return out;
  auto values = out.values();
  const std::size_t n = values.size();
  // Box-Muller on counter-indexed pairs: entries 2j and 2j+1 share a draw pair.
  for (std::size_t j = 0; 2 * j < n; ++j) {
    const double u1 = to_unit_open(counter_draw(noise.seed, 2 * j + 1));
    const double u2 = to_unit(counter_draw(noise.seed, 2 * j + 2));
    const double r = noise.sigma * std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    values[2 * j] += r * std::cos(theta);
    if (2 * j + 1 < n) values[2 * j + 1] += r * std::sin(theta);
  }
  return out;
}

GridField subsample(const GridField& field, std::span<const std::size_t> stride) {
  const GridGeometry& g = field.geometry();
  const int naxes = g.naxes();
  if (stride.size() != static_cast<std::size_t>(naxes))
    throw Error(ErrorCode::InvalidArgument, "stride must have one entry per axis");
  GridGeometry out_g = g;
  for (int a = 0; a < naxes; ++a) {
    if (stride[a] < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
    if (stride[a] >= g.shape[a])
      throw Error(ErrorCode::EmptyResult, "stride on axis " + std::to_string(a) + " leaves fewer than 2 samples");
    out_g.shape[a] = (g.shape[a] - 1) / stride[a] + 1;
    out_g.spacing[a] = g.spacing[a] * static_cast<double>(stride[a]);
  }
  GridField out(out_g, field.ncomp());
  std::vector<std::size_t> idx(naxes, 0);
  for (int c = 0; c < field.ncomp(); ++c) {
    auto src = field.component(c);
    auto dst = out.component(c);
    for (std::size_t flat = 0; flat < out.points(); ++flat) {
      std::size_t rem = flat, src_flat = 0;
      for (int a = naxes - 1; a >= 0; --a) {
        idx[a] = rem % out_g.shape[a];
        rem /= out_g.shape[a];
      }
      for (int a = 0; a < naxes; ++a) src_flat = src_flat * g.shape[a] + idx[a] * stride[a];
      dst[flat] = src[src_flat];
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_field(const GridField& field) {
  const GridGeometry& g = field.geometry();
  std::vector<std::uint8_t> out;
  out.reserve(8 + 24 * g.naxes() + 8 * field.values().size());
  out.insert(out.end(), kMagic, kMagic + 4);
  put_le<std::uint16_t>(out, kFieldFormatVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(g.ndim_space));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(field.ncomp()));
  for (int a = 0; a < g.naxes(); ++a) {
    put_le<std::uint64_t>(out, g.shape[a]);
    put_le<double>(out, g.spacing[a]);
    put_le<double>(out, g.origin[a]);
  }
  for (double v : field.values()) put_le<double>(out, v);
  return out;
}

GridField decode_field(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorCode::MalformedHeader, "missing WFPD magic");
  Reader in(bytes.subspan(4));
  const auto version = in.get<std::uint16_t>(ErrorCode::MalformedHeader);
  if (version != kFieldFormatVersion)
    throw Error(ErrorCode::UnsupportedVersion, "field format version " + std::to_string(version));
  GridGeometry g;
  g.ndim_space = in.get<std::uint8_t>(ErrorCode::MalformedHeader);
  const int ncomp = in.get<std::uint8_t>(ErrorCode::MalformedHeader);
  if (g.ndim_space != 1 && g.ndim_space != 2) throw Error(ErrorCode::MalformedHeader, "bad ndim_space");
  if (ncomp != 1 && ncomp != 2) throw Error(ErrorCode::MalformedHeader, "bad ncomp");
  for (int a = 0; a < g.naxes(); ++a) {
    g.shape.push_back(in.get<std::uint64_t>(ErrorCode::MalformedHeader));
    g.spacing.push_back(in.get<double>(ErrorCode::MalformedHeader));
    g.origin.push_back(in.get<double>(ErrorCode::MalformedHeader));
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedHeader, e.what());
  }
  const std::size_t count = g.points() * static_cast<std::size_t>(ncomp);
  if (in.remaining() / 8 < count) throw Error(ErrorCode::TruncatedPayload, "payload shorter than header promises");
  if (in.remaining() != count * 8) throw Error(ErrorCode::MalformedHeader, "trailing bytes after payload");
  GridField field(std::move(g), ncomp);
  for (double& v : field.values()) v = in.get<double>(ErrorCode::TruncatedPayload);
  field.check_finite();
  return field;
}

void write_atomically(const std::filesystem::path& path, std::span<const char> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_field(const GridField& field, const std::filesystem::path& path) {
  const auto bytes = encode_field(field);
  write_atomically(path, std::span(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

GridField load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_field(bytes);
}

void export_csv(const GridField& field, const std::filesystem::path& path) {
  const GridGeometry& g = field.geometry();
  std::ostringstream os;
  os << std::setprecision(17);
  const char* names[] = {"x", "y"};
  for (int a = 0; a < g.ndim_space; ++a) os << names[a] << ',';
  os << 't';
  for (int c = 0; c < field.ncomp(); ++c) os << ",u" << c;
  os << '\n';
  std::vector<std::size_t> idx(g.naxes());
  for (std::size_t flat = 0; flat < field.points(); ++flat) {
    std::size_t rem = flat;
    for (int a = g.naxes() - 1; a >= 0; --a) {
      idx[a] = rem % g.shape[a];
      rem /= g.shape[a];
    }
    for (int a = 0; a < g.naxes(); ++a) os << (a ? "," : "") << g.coordinate(a, idx[a]);
    for (int c = 0; c < field.ncomp(); ++c) os << ',' << field.component(c)[flat];
    os << '\n';
  }
  const std::string text = os.str();
  write_atomically(path, std::span(text.data(), text.size()));
}

}  // namespace weakpde
