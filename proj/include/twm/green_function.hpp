#pragma once

#include <map>
#include <optional>
#include <string>

#include "twm/model.hpp"

namespace twm {

enum class Block { rr, rs, sr, ss };

std::string to_string(Block b);
Block block_from_string(const std::string& name);
// Output and input channel of a block ('r' or 's').
char output_channel(Block b);
char input_channel(Block b);

// Orthonormal Hermite-Gauss set {B_0..B_{size-1}} of one width and center.
struct BasisSpec {
  int size = 0;
  double width = 1.0;
  double center = 0.0;

  // Sampling axis fine enough for the top order and wide enough for its tails.
  Axis sampling_axis() const;
  Mat sample(const Axis& axis) const;
};

// weight * delta(t - t' - delay), the transmitted part of rr and ss.
struct SingularPart {
  double delay = 0.0;
  cplx weight = 1.0;
};

enum class GfForm { grid, basis };

// Discretized Green function. Block X_jk maps channel k input to channel j
// output: rows index output samples (or output basis coefficients), columns
// index input samples (or coefficients). Absent blocks are 0x0.
//
// Grid form holds kernel values G(t, t') on uniform axes; the operator on
// orthonormal coordinates is G * sqrt(dt dt') plus any singular part.
// Basis form holds coefficient matrices in orthonormal bases.
struct GreenFunction {
  GfForm form = GfForm::grid;
  CMat rr, rs, sr, ss;
  Axis in_r, in_s, out_r, out_s;
  BasisSpec basis_in_r, basis_in_s, basis_out_r, basis_out_s;
  std::optional<SingularPart> rr_delta, ss_delta;
  std::map<std::string, std::string> metadata;

  bool has(Block b) const { return block(b).size() > 0; }
  const CMat& block(Block b) const;
  CMat& block(Block b);

  const Axis& in_axis(char channel) const { return channel == 'r' ? in_r : in_s; }
  const Axis& out_axis(char channel) const { return channel == 'r' ? out_r : out_s; }
  const BasisSpec& in_basis(char channel) const { return channel == 'r' ? basis_in_r : basis_in_s; }
  const BasisSpec& out_basis(char channel) const { return channel == 'r' ? basis_out_r : basis_out_s; }

  // Block as a matrix acting on orthonormal coordinates (quadrature weights
  // and singular parts included).
  CMat operator_matrix(Block b) const;

  // Throws DataError on inconsistent dimensions or non-finite entries.
  void validate() const;
};

}  // namespace twm
