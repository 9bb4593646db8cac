#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>

namespace endorse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Built-in score functions.
enum class ScoreKind { RootDegree, PageRank, SpringRank };

std::string_view to_string(ScoreKind kind);

/// Parses "rootdegree", "pagerank" or "springrank" (case-insensitive, '-' and '_' ignored).
ScoreKind parse_score_kind(std::string_view name);

inline constexpr ScoreKind kAllScoreKinds[] = {ScoreKind::RootDegree, ScoreKind::PageRank,
                                               ScoreKind::SpringRank};

} // namespace endorse
