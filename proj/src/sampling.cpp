#include "qntk/sampling.hpp"

#include "qntk/errors.hpp"

namespace qntk {

SampleSet sample_parameters(std::size_t L, std::int64_t N, std::uint64_t seed) {
  if (L < 1) {
    throw PreconditionError("sample_parameters requires L >= 1");
  }
  if (N < 1) {
    throw PreconditionError("sample_parameters requires N >= 1");
  }
  return SampleSet{seed, N, L};
}

}  // namespace qntk
