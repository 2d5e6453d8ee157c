#include "llamafur/matrix.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "llamafur/io_util.hpp"

namespace llamafur {

namespace {
constexpr char kMatrixMagic[4] = {'L', 'F', 'M', 'X'};
constexpr std::uint32_t kMatrixVersion = 1;
}  // namespace

void CategoryMatrix::check(cat_id c) const {
  if (c >= dim_)
    throw std::out_of_range("category id " + std::to_string(c) +
                            " out of range (dim=" + std::to_string(dim_) +
                            ")");
}

double CategoryMatrix::block_sum(std::span<const cat_id> rows,
                                 std::span<const cat_id> cols) const {
  double sum = 0.0;
  for (cat_id c : rows) {
    const double* row = weights_.data() + static_cast<std::size_t>(c) * dim_;
    for (cat_id cp : cols) sum += row[cp];
  }
  return sum;
}

void CategoryMatrix::add_to_block(std::span<const cat_id> rows,
                                  std::span<const cat_id> cols, double delta) {
  for (cat_id c : rows) {
    double* row = weights_.data() + static_cast<std::size_t>(c) * dim_;
    for (cat_id cp : cols) row[cp] += delta;
  }
}

bool CategoryMatrix::all_finite() const {
  for (double v : weights_)
    if (!std::isfinite(v)) return false;
  return true;
}

void save_matrix(const CategoryMatrix& w, const std::string& path,
                 unsigned element_width) {
  if (element_width != 4 && element_width != 8)
    throw std::invalid_argument("matrix element width must be 4 or 8");
  std::string out;
  out.reserve(24 + w.data().size() * element_width);
  out.append(kMatrixMagic, 4);
  io::append_u32(out, kMatrixVersion);
  io::append_u64(out, w.dim());
  io::append_u32(out, element_width);
  if (element_width == 8) {
    for (double v : w.data()) io::append_u64(out, std::bit_cast<std::uint64_t>(v));
  } else {
    for (double v : w.data())
      io::append_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  io::write_file(path, out);
}

CategoryMatrix load_matrix(const std::string& path) {
  std::string content = io::read_file(path);
  const char* p = content.data();
  const char* end = p + content.size();
  if (end - p < 4 ||
      std::string_view(p, 4) != std::string_view(kMatrixMagic, 4))
    throw std::runtime_error(path + ": bad matrix magic");
  p += 4;
  std::uint32_t version = io::read_u32(p, end, path);
  if (version != kMatrixVersion)
    throw std::runtime_error(path + ": unsupported matrix version " +
                             std::to_string(version));
  std::uint64_t dim = io::read_u64(p, end, path);
  std::uint32_t width = io::read_u32(p, end, path);
  if (width != 4 && width != 8)
    throw std::runtime_error(path + ": bad element width");
  const std::uint64_t cells = dim * dim;
  if (static_cast<std::uint64_t>(end - p) != cells * width)
    throw std::runtime_error(path + ": payload size mismatch");

  CategoryMatrix w(static_cast<cat_id>(dim));
  for (cat_id c = 0; c < w.dim(); ++c)
    for (cat_id cp = 0; cp < w.dim(); ++cp)
      w.at(c, cp) = width == 8
                        ? std::bit_cast<double>(io::read_u64(p, end, path))
                        : static_cast<double>(
                              std::bit_cast<float>(io::read_u32(p, end, path)));
  return w;
}

}  // namespace llamafur
