#include "endorse/data.hpp"

#include "endorse/errors.hpp"
#include "endorse/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace endorse::data {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

// Reads the next non-empty line, stripping a trailing CR. Returns false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            return true;
    }
    return false;
}

void expect_header(std::istream& in, const std::vector<std::string>& columns, std::size_t& line_no) {
    std::string line;
    if (!next_line(in, line, line_no))
        throw FormatError("empty input, expected header", 1);
    const auto cells = split(line);
    for (std::size_t c = 0; c < std::max(cells.size(), columns.size()); ++c) {
        if (c >= cells.size())
            throw FormatError("missing column '" + columns[c] + "'", line_no);
        if (c >= columns.size() || cells[c] != columns[c])
            throw FormatError("unknown column '" + cells[c] + "'", line_no);
    }
}

std::vector<std::string> read_row(const std::string& line, std::size_t width, std::size_t line_no) {
    auto cells = split(line);
    if (cells.size() != width)
        throw FormatError("expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()),
                          line_no);
    for (const auto& cell : cells)
        if (!valid_label(cell))
            throw FormatError("invalid field '" + cell + "'", line_no);
    return cells;
}

long long parse_integer(const std::string& text, std::size_t line_no, const char* what) {
    long long value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw FormatError(std::string(what) + " '" + text + "' is not an integer", line_no);
    return value;
}

bool parse_number(const std::string& text, double& value) {
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, value);
    return ec == std::errc() && ptr == last;
}

// Ordering of period labels: numeric when every label is a number.
struct PeriodOrder {
    bool numeric = true;

    explicit PeriodOrder(const std::vector<std::string>& labels) {
        double v;
        for (const auto& l : labels)
            if (!parse_number(l, v)) {
                numeric = false;
                break;
            }
    }

    bool less(const std::string& x, const std::string& y) const {
        if (numeric) {
            double a = 0.0, b = 0.0;
            parse_number(x, a);
            parse_number(y, b);
            if (a != b)
                return a < b;
        }
        return x < y;
    }
};

} // namespace

bool valid_label(std::string_view label) {
    if (label.empty())
        return false;
    return std::all_of(label.begin(), label.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
               c == '-';
    });
}

InteractionSequence from_records(const std::vector<EdgeRecord>& records, const std::string& period_unit) {
    if (records.empty())
        throw DomainError("no interactions");
    std::set<std::string> nodes;
    std::vector<std::string> periods;
    for (const auto& r : records) {
        if (!valid_label(r.source) || !valid_label(r.target) || !valid_label(r.period))
            throw DomainError("invalid label in record (" + r.period + "," + r.source + "," + r.target + ")");
        if (r.count < 1)
            throw DomainError("count must be positive, got " + std::to_string(r.count));
        nodes.insert(r.source);
        nodes.insert(r.target);
        periods.push_back(r.period);
    }
    const PeriodOrder order(periods);
    std::sort(periods.begin(), periods.end(), [&](const auto& x, const auto& y) { return order.less(x, y); });
    periods.erase(std::unique(periods.begin(), periods.end()), periods.end());

    InteractionSequence seq;
    seq.node_labels.assign(nodes.begin(), nodes.end());
    seq.period_labels = periods;
    seq.period_unit = period_unit;
    std::map<std::string, Eigen::Index> node_index;
    for (std::size_t i = 0; i < seq.node_labels.size(); ++i)
        node_index[seq.node_labels[i]] = static_cast<Eigen::Index>(i);
    std::map<std::string, std::size_t> period_index;
    for (std::size_t t = 0; t < periods.size(); ++t)
        period_index[periods[t]] = t;

    const auto n = static_cast<Eigen::Index>(nodes.size());
    seq.deltas.assign(periods.size(), Matrix::Zero(n, n));
    for (const auto& r : records)
        seq.deltas[period_index.at(r.period)](node_index.at(r.source), node_index.at(r.target)) +=
            static_cast<double>(r.count);
    return seq;
}

InteractionSequence read_edge_list(std::istream& in, const std::string& period_unit) {
    std::size_t line_no = 0;
    expect_header(in, {"period", "source", "target", "count"}, line_no);
    std::vector<EdgeRecord> records;
    std::string line;
    while (next_line(in, line, line_no)) {
        const auto cells = read_row(line, 4, line_no);
        EdgeRecord r{cells[0], cells[1], cells[2], parse_integer(cells[3], line_no, "count")};
        if (r.count < 0)
            throw DomainError("line " + std::to_string(line_no) + ": negative count " + cells[3]);
        if (r.count == 0)
            throw DomainError("line " + std::to_string(line_no) + ": count must be positive");
        records.push_back(std::move(r));
    }
    if (records.empty())
        throw FormatError("no interactions", line_no);
    return from_records(records, period_unit);
}

InteractionSequence load_edge_list(const std::filesystem::path& path, const std::string& period_unit) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    return read_edge_list(in, period_unit);
}

void write_edge_list(const InteractionSequence& seq, std::ostream& out) {
    seq.validate();
    out << "period,source,target,count\n";
    for (std::size_t t = 0; t < seq.deltas.size(); ++t) {
        const std::string period = seq.period_labels.empty() ? std::to_string(t) : seq.period_labels[t];
        const Matrix& d = seq.deltas[t];
        for (Eigen::Index i = 0; i < d.rows(); ++i)
            for (Eigen::Index j = 0; j < d.cols(); ++j)
                if (d(i, j) > 0.0)
                    out << period << ',' << seq.node_labels[static_cast<std::size_t>(i)] << ','
                        << seq.node_labels[static_cast<std::size_t>(j)] << ',' << report::format_double(d(i, j))
                        << '\n';
    }
}

Matrix read_labeled_matrix(std::istream& in, const std::vector<std::string>& node_labels) {
    std::size_t line_no = 0;
    std::string line;
    if (!next_line(in, line, line_no))
        throw FormatError("empty matrix file", 1);
    const auto header = split(line);
    std::map<std::string, Eigen::Index> index;
    for (std::size_t i = 0; i < node_labels.size(); ++i)
        index[node_labels[i]] = static_cast<Eigen::Index>(i);
    const auto n = static_cast<Eigen::Index>(node_labels.size());

    std::vector<Eigen::Index> columns;
    for (std::size_t c = 1; c < header.size(); ++c) {
        auto it = index.find(header[c]);
        if (it == index.end())
            throw FormatError("unknown node '" + header[c] + "'", line_no);
        columns.push_back(it->second);
    }
    Matrix a = Matrix::Zero(n, n);
    std::set<Eigen::Index> seen_rows;
    while (next_line(in, line, line_no)) {
        const auto cells = split(line);
        if (cells.size() != columns.size() + 1)
            throw FormatError("expected " + std::to_string(columns.size() + 1) + " fields", line_no);
        auto it = index.find(cells[0]);
        if (it == index.end())
            throw FormatError("unknown node '" + cells[0] + "'", line_no);
        if (!seen_rows.insert(it->second).second)
            throw FormatError("duplicate row for node '" + cells[0] + "'", line_no);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            double v = 0.0;
            if (!parse_number(cells[c + 1], v))
                throw FormatError("'" + cells[c + 1] + "' is not a number", line_no);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw DomainError("line " + std::to_string(line_no) + ": matrix entries must be nonnegative");
            a(it->second, columns[c]) = v;
        }
    }
    return a;
}

std::vector<RankingRecord> read_rankings(std::istream& in) {
    std::size_t line_no = 0;
    expect_header(in, {"week", "ranker", "ranked", "rank"}, line_no);
    std::vector<RankingRecord> out;
    std::string line;
    while (next_line(in, line, line_no)) {
        const auto cells = read_row(line, 4, line_no);
        const long long rank = parse_integer(cells[3], line_no, "rank");
        if (rank < 1)
            throw FormatError("rank must be at least 1", line_no);
        out.push_back({cells[0], cells[1], cells[2], static_cast<int>(rank)});
    }
    if (out.empty())
        throw FormatError("no rankings", line_no);
    return out;
}

InteractionSequence convert_rankings_topk(const std::vector<RankingRecord>& records, int k) {
    if (k < 1)
        throw DomainError("k must be at least 1");
    std::set<std::string> members;
    for (const auto& r : records) {
        members.insert(r.ranker);
        members.insert(r.ranked);
    }
    const std::size_t others = members.size() - 1;
    // week -> ranker -> (ranked -> rank)
    std::map<std::string, std::map<std::string, std::map<std::string, int>>> weeks;
    for (const auto& r : records) {
        if (r.ranker == r.ranked)
            throw DomainError("week " + r.week + ": " + r.ranker + " ranks itself");
        auto& row = weeks[r.week][r.ranker];
        if (!row.emplace(r.ranked, r.rank).second)
            throw DomainError("week " + r.week + ": " + r.ranker + " ranks " + r.ranked + " twice");
    }
    std::vector<EdgeRecord> edges;
    for (const auto& [week, rankers] : weeks) {
        for (const auto& member : members)
            if (!rankers.count(member))
                throw DomainError("week " + week + ": no ranking from " + member);
        for (const auto& [ranker, row] : rankers) {
            std::vector<int> ranks;
            for (const auto& [ranked, rank] : row)
                ranks.push_back(rank);
            std::sort(ranks.begin(), ranks.end());
            bool complete = row.size() == others;
            for (std::size_t i = 0; complete && i < ranks.size(); ++i)
                complete = ranks[i] == static_cast<int>(i + 1);
            if (!complete)
                throw DomainError("week " + week + ": ranking by " + ranker + " is incomplete (needs ranks 1.." +
                                  std::to_string(others) + " over all other members)");
            for (const auto& [ranked, rank] : row)
                if (rank <= k)
                    edges.push_back({week, ranker, ranked, 1});
        }
    }
    auto seq = from_records(edges, "week");
    if (static_cast<std::size_t>(seq.n()) != members.size())
        throw DomainError("some members never endorse or receive endorsements at k = " + std::to_string(k));
    return seq;
}

std::vector<PlacementRecord> read_placements(std::istream& in) {
    std::size_t line_no = 0;
    expect_header(in, {"period", "degree_from", "hired_by"}, line_no);
    std::vector<PlacementRecord> out;
    std::string line;
    while (next_line(in, line, line_no)) {
        const auto cells = read_row(line, 3, line_no);
        out.push_back({cells[0], cells[1], cells[2]});
    }
    if (out.empty())
        throw FormatError("no placements", line_no);
    return out;
}

InteractionSequence convert_placements(const std::vector<PlacementRecord>& records, PlacementDirection direction) {
    std::vector<EdgeRecord> edges;
    edges.reserve(records.size());
    for (const auto& r : records) {
        if (direction == PlacementDirection::HiringToDegree)
            edges.push_back({r.period, r.hired_by, r.degree_from, 1});
        else
            edges.push_back({r.period, r.degree_from, r.hired_by, 1});
    }
    return from_records(edges, "year");
}

std::vector<ContestRecord> read_contests(std::istream& in) {
    std::size_t line_no = 0;
    expect_header(in, {"period", "winner", "loser"}, line_no);
    std::vector<ContestRecord> out;
    std::string line;
    while (next_line(in, line, line_no)) {
        const auto cells = read_row(line, 3, line_no);
        out.push_back({cells[0], cells[1], cells[2]});
    }
    if (out.empty())
        throw FormatError("no contests", line_no);
    return out;
}

InteractionSequence convert_contests(const std::vector<ContestRecord>& records) {
    std::vector<EdgeRecord> edges;
    edges.reserve(records.size());
    for (const auto& r : records)
        edges.push_back({r.period, r.loser, r.winner, 1});
    return from_records(edges);
}

PeriodWindow window_between(const InteractionSequence& seq, const std::string& lo, const std::string& hi) {
    std::vector<std::string> labels = seq.period_labels;
    labels.push_back(lo);
    labels.push_back(hi);
    const PeriodOrder order(labels);
    if (order.less(hi, lo))
        throw DomainError("window end " + hi + " precedes its start " + lo);
    PeriodWindow w{seq.period_labels.size(), seq.period_labels.size()};
    bool started = false;
    for (std::size_t t = 0; t < seq.period_labels.size(); ++t) {
        const auto& p = seq.period_labels[t];
        const bool inside = !order.less(p, lo) && !order.less(hi, p);
        if (inside && !started) {
            w.first = t;
            started = true;
        }
        if (started && !inside && order.less(hi, p)) {
            w.last = t;
            break;
        }
    }
    if (!started)
        throw DomainError("no periods between " + lo + " and " + hi);
    return w;
}

InteractionSequence restrict_top_placers(const InteractionSequence& seq, std::size_t count, PeriodWindow window) {
    seq.validate();
    const auto n = static_cast<std::size_t>(seq.deltas.front().rows());
    if (count > n)
        throw DomainError("cannot keep " + std::to_string(count) + " of " + std::to_string(n) + " nodes");
    if (count < 2)
        throw DomainError("at least two nodes must be kept");
    if (window.first >= window.last || window.last > seq.periods())
        throw DomainError("window is empty or outside the sequence");

    Vector received = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t t = window.first; t < window.last; ++t)
        received += seq.deltas[t].colwise().sum().transpose();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto xi = static_cast<Eigen::Index>(x), yi = static_cast<Eigen::Index>(y);
        if (received(xi) != received(yi))
            return received(xi) > received(yi);
        return seq.node_labels[x] < seq.node_labels[y];
    });
    std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(kept.begin(), kept.end());
    std::vector<Eigen::Index> idx(kept.begin(), kept.end());

    InteractionSequence out;
    out.period_labels = seq.period_labels;
    out.period_unit = seq.period_unit;
    for (std::size_t i : kept)
        out.node_labels.push_back(seq.node_labels[i]);
    for (const auto& d : seq.deltas)
        out.deltas.push_back(d(idx, idx));
    if (seq.a0)
        out.a0 = Matrix((*seq.a0)(idx, idx));
    return out;
}

} // namespace endorse::data
