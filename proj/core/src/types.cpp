#include "collapse/types.hpp"

namespace collapse {

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.size();
  return n;
}

}  // namespace collapse
