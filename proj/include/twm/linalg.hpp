#pragma once

#include "twm/model.hpp"

namespace twm {

// Thin SVD a = u * diag(s) * v^H with s descending.
struct Svd {
  Vec s;
  CMat u;
  CMat v;
};

Svd svd(const CMat& a);
Vec singular_values(const CMat& a);

}  // namespace twm
