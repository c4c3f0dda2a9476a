#include <lrme/entry_set.hpp>

#include <algorithm>
#include <string>

namespace lrme {

EntrySet::EntrySet(Index rows, Index cols) {
  if (rows < 0 || cols < 0) {
    throw ArgumentError("EntrySet: negative shape");
  }
  mask_ = Mask::Constant(rows, cols, false);
}

EntrySet::EntrySet(Mask mask) : mask_(std::move(mask)) {}

EntrySet EntrySet::full(Index rows, Index cols) {
  EntrySet s(rows, cols);
  s.mask_.setConstant(true);
  return s;
}

EntrySet EntrySet::from_indices(Index rows, Index cols,
                                const std::vector<std::pair<Index, Index>>& indices) {
  EntrySet s(rows, cols);
  for (const auto& [i, j] : indices) {
    s.check_index(i, j, "EntrySet::from_indices");
    if (s.mask_(i, j)) {
      throw ArgumentError("EntrySet::from_indices: duplicate pair (" + std::to_string(i) +
                          "," + std::to_string(j) + ")");
    }
    s.mask_(i, j) = true;
  }
  return s;
}

void EntrySet::check_index(Index i, Index j, const char* where) const {
  if (i < 0 || j < 0 || i >= rows() || j >= cols()) {
    throw ArgumentError(std::string(where) + ": index (" + std::to_string(i) + "," +
                        std::to_string(j) + ") outside " + std::to_string(rows()) + "x" +
                        std::to_string(cols()));
  }
}

void EntrySet::check_shape(const EntrySet& other, const char* where) const {
  if (rows() != other.rows() || cols() != other.cols()) {
    throw DimensionError(std::string(where) + ": entry sets index different shapes");
  }
}

bool EntrySet::contains(Index i, Index j) const {
  check_index(i, j, "EntrySet::contains");
  return mask_(i, j);
}

void EntrySet::insert(Index i, Index j) {
  check_index(i, j, "EntrySet::insert");
  mask_(i, j) = true;
}

void EntrySet::erase(Index i, Index j) {
  check_index(i, j, "EntrySet::erase");
  mask_(i, j) = false;
}

EntrySet EntrySet::complement() const { return EntrySet(Mask(!mask_)); }

EntrySet EntrySet::operator|(const EntrySet& other) const {
  check_shape(other, "EntrySet union");
  return EntrySet(Mask(mask_ || other.mask_));
}

EntrySet EntrySet::operator&(const EntrySet& other) const {
  check_shape(other, "EntrySet intersection");
  return EntrySet(Mask(mask_ && other.mask_));
}

EntrySet EntrySet::operator-(const EntrySet& other) const {
  check_shape(other, "EntrySet difference");
  return EntrySet(Mask(mask_ && !other.mask_));
}

bool EntrySet::operator==(const EntrySet& other) const {
  return rows() == other.rows() && cols() == other.cols() && (mask_ == other.mask_).all();
}

Eigen::VectorXi EntrySet::row_counts() const {
  return mask_.cast<int>().rowwise().sum().matrix();
}

Eigen::VectorXi EntrySet::col_counts() const {
  return mask_.cast<int>().colwise().sum().transpose().matrix();
}

int EntrySet::max_line_count() const {
  if (rows() == 0 || cols() == 0) return 0;
  return std::max(row_counts().maxCoeff(), col_counts().maxCoeff());
}

std::vector<std::pair<Index, Index>> EntrySet::indices() const {
  std::vector<std::pair<Index, Index>> out;
  out.reserve(size());
  for (Index i = 0; i < rows(); ++i) {
    for (Index j = 0; j < cols(); ++j) {
      if (mask_(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace lrme
