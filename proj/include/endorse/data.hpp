#pragma once

#include "endorse/inference.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace endorse::data {

using inference::InteractionSequence;

/// One aggregated interaction: `source` endorses `target` `count` times in `period`.
struct EdgeRecord {
    std::string period;
    std::string source;
    std::string target;
    long long count = 1;
};

/// Labels must match [A-Za-z0-9_.-]+.
bool valid_label(std::string_view label);

/**
 * Periods sort numerically when every label parses as a number and
 * lexicographically otherwise. Nodes are indexed by sorted label.
 * Duplicate (period, source, target) records are summed.
 */
InteractionSequence from_records(const std::vector<EdgeRecord>& records, const std::string& period_unit = "period");

/// Reads the `period,source,target,count` interchange CSV. Throws FormatError with line numbers.
InteractionSequence read_edge_list(std::istream& in, const std::string& period_unit = "period");
InteractionSequence load_edge_list(const std::filesystem::path& path, const std::string& period_unit = "period");

/// Writes the interchange CSV (LF endings, cells in row-major order per period).
void write_edge_list(const InteractionSequence& seq, std::ostream& out);

/// Reads a headerless or headed CSV n x n matrix with node labels in the first row/column.
Matrix read_labeled_matrix(std::istream& in, const std::vector<std::string>& node_labels);

/// One entry of a weekly preference ranking: `ranker` puts `ranked` at position `rank` (1 = most preferred).
struct RankingRecord {
    std::string week;
    std::string ranker;
    std::string ranked;
    int rank = 0;
};

/// Reads `week,ranker,ranked,rank`.
std::vector<RankingRecord> read_rankings(std::istream& in);

/**
 * Endorsement i -> j (count 1) whenever i ranks j within its top k that week.
 * Every ranker must rank every other member exactly once with ranks 1..n-1.
 */
InteractionSequence convert_rankings_topk(const std::vector<RankingRecord>& records, int k = 5);

/// A graduate of `degree_from` supervising at `hired_by` in `period`.
struct PlacementRecord {
    std::string period;
    std::string degree_from;
    std::string hired_by;
};

enum class PlacementDirection {
    HiringToDegree,   // hired_by -> degree_from: the hiring institution endorses
    DegreeToHiring,
};

/// Reads `period,degree_from,hired_by`.
std::vector<PlacementRecord> read_placements(std::istream& in);
InteractionSequence convert_placements(const std::vector<PlacementRecord>& records,
                                       PlacementDirection direction = PlacementDirection::HiringToDegree);

/// A contest in `period` won by `winner`.
struct ContestRecord {
    std::string period;
    std::string winner;
    std::string loser;
};

/// Reads `period,winner,loser`.
std::vector<ContestRecord> read_contests(std::istream& in);
/// The loser endorses the winner: loser -> winner.
InteractionSequence convert_contests(const std::vector<ContestRecord>& records);

/// Half-open index range [first, last) of periods.
struct PeriodWindow {
    std::size_t first = 0;
    std::size_t last = 0;
};

/// Periods whose labels fall in [lo, hi] under the sequence's period ordering.
PeriodWindow window_between(const InteractionSequence& seq, const std::string& lo, const std::string& hi);

/**
 * Keeps the `count` nodes that received the most endorsements within `window`,
 * breaking ties by label, and drops every interaction touching the others.
 */
InteractionSequence restrict_top_placers(const InteractionSequence& seq, std::size_t count, PeriodWindow window);

} // namespace endorse::data
