#include "twm/green_function.hpp"

#include <cmath>

#include "twm/errors.hpp"

namespace twm {

std::string to_string(Block b) {
  switch (b) {
    case Block::rr: return "rr";
    case Block::rs: return "rs";
    case Block::sr: return "sr";
    case Block::ss: return "ss";
  }
  return "rs";
}

Block block_from_string(const std::string& name) {
  if (name == "rr") return Block::rr;
  if (name == "rs") return Block::rs;
  if (name == "sr") return Block::sr;
  if (name == "ss") return Block::ss;
  throw ConfigError("unknown Green-function block '" + name + "'");
}

char output_channel(Block b) { return (b == Block::rr || b == Block::rs) ? 'r' : 's'; }
char input_channel(Block b) { return (b == Block::rr || b == Block::sr) ? 'r' : 's'; }

Axis BasisSpec::sampling_axis() const {
  const double q = std::sqrt(2.0 * std::max(size, 1) + 1.0);
  const double step = 0.5 * width / q;
  const double reach = (q + 6.0) * width;
  const int n = static_cast<int>(std::ceil(2.0 * reach / step)) + 1;
  return {center - reach, step, n};
}

Mat BasisSpec::sample(const Axis& axis) const {
  return hermite_gauss_functions(size, width, center, axis.samples());
}

const CMat& GreenFunction::block(Block b) const {
  switch (b) {
    case Block::rr: return rr;
    case Block::rs: return rs;
    case Block::sr: return sr;
    case Block::ss: return ss;
  }
  return rs;
}

CMat& GreenFunction::block(Block b) {
  return const_cast<CMat&>(static_cast<const GreenFunction&>(*this).block(b));
}

CMat GreenFunction::operator_matrix(Block b) const {
  const CMat& g = block(b);
  if (form == GfForm::basis) return g;
  const Axis& out = out_axis(output_channel(b));
  const Axis& in = in_axis(input_channel(b));
  CMat m = g * std::sqrt(out.step * in.step);
  const auto& delta = b == Block::rr ? rr_delta : (b == Block::ss ? ss_delta : std::nullopt);
  if (delta) {
    if (std::abs(out.step - in.step) > 1e-12 * in.step)
      throw UnsupportedError("singular part needs equal input and output spacing");
    const double shift = (in.start + delta->delay - out.start) / in.step;
    const long k = std::lround(shift);
    if (std::abs(shift - k) > 1e-6)
      throw UnsupportedError("singular part delay is not a whole number of samples");
    // out index i = in index j - k
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Eigen::Index i = j + k;
      if (i >= 0 && i < m.rows()) m(i, j) += delta->weight;
    }
  }
  return m;
}

void GreenFunction::validate() const {
  for (Block b : {Block::rr, Block::rs, Block::sr, Block::ss}) {
    const CMat& g = block(b);
    if (g.size() == 0) continue;
    if (!g.allFinite()) throw DataError("block " + to_string(b) + " has non-finite entries");
    const char o = output_channel(b), i = input_channel(b);
    const int rows = form == GfForm::grid ? out_axis(o).size : out_basis(o).size;
    const int cols = form == GfForm::grid ? in_axis(i).size : in_basis(i).size;
    if (g.rows() != rows || g.cols() != cols)
      throw DataError("block " + to_string(b) + " is " + std::to_string(g.rows()) + "x" + std::to_string(g.cols()) +
                      ", metadata says " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace twm
