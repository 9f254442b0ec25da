/*
 * Copyright 2026 The kernelgen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KERNELGEN_SAMPLER_HPP
#define KERNELGEN_SAMPLER_HPP

#include <cstdint>
#include <random>

#include "kernelgen/posterior.hpp"

namespace kernelgen {

/// n_draws x n* matrix whose rows are mean + chol z with z ~ N(0, I) drawn
/// from a generator seeded with `seed`. Draw k consumes the k-th block of n*
/// standard normals, so a fixed seed reproduces every draw exactly.
template <typename Scalar>
Matrix<Scalar> sample_posterior(const PosteriorGaussian<Scalar>& post, Eigen::Index n_draws,
                                std::uint64_t seed) {
  if (n_draws < 1) throw InvalidDataset("sample_posterior needs at least one draw");
  const Eigen::Index dim = post.mean.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  Matrix<Scalar> z(dim, n_draws);
  for (Eigen::Index k = 0; k < n_draws; ++k)
    for (Eigen::Index i = 0; i < dim; ++i) z(i, k) = Scalar(unit(rng));
  Matrix<Scalar> draws = post.chol.template triangularView<Eigen::Lower>() * z;
  draws.colwise() += post.mean;
  return draws.transpose();
}

}  // namespace kernelgen

#endif  // KERNELGEN_SAMPLER_HPP
