#pragma once

#include <cstdint>

namespace llamafur {

// Dense non-negative ids throughout: nodes, categories and terms are all
// index-addressed. String-keyed corpora are mapped to ids at ingestion.
using node_id = std::uint32_t;
using cat_id = std::uint32_t;
using term_id = std::uint32_t;

// One id is reserved so that num_nodes = max_id + 1 cannot overflow.
inline constexpr std::uint64_t kMaxId = 0xFFFFFFFEull;

}  // namespace llamafur
