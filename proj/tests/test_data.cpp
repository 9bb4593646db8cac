#include "doctest.h"
#include "oracles.hpp"

#include "endorse/data.hpp"
#include "endorse/errors.hpp"

#include <sstream>
#include <string>

using namespace endorse;
using namespace endorse::data;

namespace {

InteractionSequence parse(const std::string& text) {
    std::istringstream in(text);
    return read_edge_list(in);
}

template <class E>
std::string message_of(const std::string& text) {
    try {
        parse(text);
    } catch (const E& e) {
        return e.what();
    }
    return "";
}

// Every member ranks the others by a fixed cyclic order.
std::string cyclic_rankings(int members, int weeks) {
    std::ostringstream out;
    out << "week,ranker,ranked,rank\n";
    for (int w = 0; w < weeks; ++w)
        for (int i = 0; i < members; ++i)
            for (int r = 1; r < members; ++r)
                out << w << ",m" << i << ",m" << (i + r) % members << ',' << r << '\n';
    return out.str();
}

} // namespace

TEST_CASE("edge list tabulation") {
    const auto seq = parse("period,source,target,count\n1,a,b,1\n2,b,a,2\n");
    REQUIRE(seq.periods() == 2);
    CHECK(seq.node_labels == std::vector<std::string>{"a", "b"});
    CHECK(seq.period_labels == std::vector<std::string>{"1", "2"});
    CHECK(seq.deltas[0] == (Matrix(2, 2) << 0, 1, 0, 0).finished());
    CHECK(seq.deltas[1] == (Matrix(2, 2) << 0, 0, 2, 0).finished());
    CHECK_FALSE(seq.a0);
}

TEST_CASE("duplicate records are summed and periods sort numerically") {
    const auto seq = parse("period,source,target,count\r\n10,a,b,1\r\n9,a,b,1\r\n10,a,b,3\r\n\r\n");
    CHECK(seq.period_labels == std::vector<std::string>{"9", "10"});
    CHECK(seq.deltas[1](0, 1) == 4.0);
    const auto lex = parse("period,source,target,count\nspring,a,b,1\nfall,b,a,1\n");
    CHECK(lex.period_labels == std::vector<std::string>{"fall", "spring"});
}

TEST_CASE("edge list errors carry line numbers") {
    CHECK(message_of<FormatError>("period,source,target,count\n") == "line 1: no interactions");
    CHECK(message_of<FormatError>("period,source,target,weight\n1,a,b,1\n").find("unknown column") !=
          std::string::npos);
    CHECK(message_of<FormatError>("period,source,target\n1,a,b\n").find("line 1") != std::string::npos);
    CHECK(message_of<FormatError>("period,source,target,count\n1,a,b,1\n2,a,b\n") ==
          "line 3: expected 4 fields, found 3");
    CHECK(message_of<FormatError>("period,source,target,count\n1,a,b,x\n").find("line 2") != std::string::npos);
    CHECK(message_of<FormatError>("period,source,target,count\n1,a b,c,1\n").find("line 2") != std::string::npos);
    CHECK(message_of<DomainError>("period,source,target,count\n1,a,b,1\n1,b,a,-2\n").find("line 3: negative count") !=
          std::string::npos);
    CHECK(message_of<FormatError>("").find("empty input") != std::string::npos);
}

TEST_CASE("edge list round trip is byte-identical") {
    oracle::Gen gen(3);
    for (int trial = 0; trial < 10; ++trial) {
        InteractionSequence seq;
        const int n = gen.integer(2, 6);
        for (int t = 0; t < gen.integer(1, 5); ++t) {
            Matrix d = gen.counts(n, gen.integer(1, 10));
            seq.deltas.push_back(d);
            seq.period_labels.push_back(std::to_string(2000 + 3 * t));
        }
        for (int i = 0; i < n; ++i)
            seq.node_labels.push_back("node_" + std::to_string(i));
        // every node must appear for the round trip to keep the node set
        seq.deltas[0].row(0).setConstant(1.0);
        std::ostringstream first;
        write_edge_list(seq, first);
        const auto back = parse(first.str());
        std::ostringstream second;
        write_edge_list(back, second);
        CHECK(first.str() == second.str());
        CHECK(back.node_labels == seq.node_labels);
        for (std::size_t t = 0; t < seq.periods(); ++t)
            CHECK(back.deltas[t] == seq.deltas[t]);
    }
}

TEST_CASE("top-k rankings") {
    std::istringstream in("week,ranker,ranked,rank\n"
                          "1,a,b,3\n1,a,c,6\n1,a,d,1\n1,a,e,2\n1,a,f,4\n1,a,g,5\n"
                          "1,b,a,1\n1,b,c,2\n1,b,d,3\n1,b,e,4\n1,b,f,5\n1,b,g,6\n"
                          "1,c,a,1\n1,c,b,2\n1,c,d,3\n1,c,e,4\n1,c,f,5\n1,c,g,6\n"
                          "1,d,a,1\n1,d,b,2\n1,d,c,3\n1,d,e,4\n1,d,f,5\n1,d,g,6\n"
                          "1,e,a,1\n1,e,b,2\n1,e,c,3\n1,e,d,4\n1,e,f,5\n1,e,g,6\n"
                          "1,f,a,1\n1,f,b,2\n1,f,c,3\n1,f,d,4\n1,f,e,5\n1,f,g,6\n"
                          "1,g,a,1\n1,g,b,2\n1,g,c,3\n1,g,d,4\n1,g,e,5\n1,g,f,6\n");
    const auto seq = convert_rankings_topk(read_rankings(in), 5);
    REQUIRE(seq.periods() == 1);
    CHECK(seq.deltas[0](0, 1) == 1.0);   // rank 3
    CHECK(seq.deltas[0](0, 2) == 0.0);   // rank 6
    CHECK(seq.deltas[0].sum() == 35.0);
}

TEST_CASE("seventeen members with k = 5 give 85 endorsements a week") {
    std::istringstream in(cyclic_rankings(17, 3));
    const auto seq = convert_rankings_topk(read_rankings(in), 5);
    CHECK(seq.n() == 17);
    for (double total : seq.totals())
        CHECK(total == 85.0);
}

TEST_CASE("incomplete rankings name the week and member") {
    std::string text = cyclic_rankings(4, 2);
    text.erase(text.rfind("1,m3,"));
    std::istringstream in(text);
    try {
        convert_rankings_topk(read_rankings(in), 2);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        const std::string what = e.what();
        CHECK(what.find("week 1") != std::string::npos);
        CHECK(what.find("m3") != std::string::npos);
    }
}

TEST_CASE("placements and contests follow the direction conventions") {
    std::istringstream placements("period,degree_from,hired_by\n1990,mit,ucla\n1991,ucla,mit\n1991,mit,ucla\n");
    const auto recs = read_placements(placements);
    const auto hiring = convert_placements(recs);
    // labels sort as mit, ucla: hiring institution endorses the degree institution
    CHECK(hiring.deltas[0](1, 0) == 1.0);
    const auto degree = convert_placements(recs, PlacementDirection::DegreeToHiring);
    CHECK(degree.deltas[0](0, 1) == 1.0);
    CHECK(degree.deltas[1].sum() == 2.0);

    std::istringstream contests("period,winner,loser\n1,x,y\n1,x,y\n2,y,x\n");
    const auto c = convert_contests(read_contests(contests));
    CHECK(c.deltas[0](1, 0) == 2.0);   // loser y endorses winner x
    CHECK(c.deltas[1](0, 1) == 1.0);
}

TEST_CASE("period windows and top placers") {
    const auto seq = parse("period,source,target,count\n"
                           "1950,a,b,5\n1960,a,c,1\n1970,b,c,2\n1970,d,a,1\n1980,c,d,1\n2010,b,d,9\n");
    const auto w = window_between(seq, "1960", "2000");
    CHECK(w.first == 1);
    CHECK(w.last == 4);
    CHECK_THROWS_AS(window_between(seq, "2000", "1960"), DomainError);
    CHECK_THROWS_AS(window_between(seq, "1990", "2000"), DomainError);

    const auto top = restrict_top_placers(seq, 2, w);
    // received within the window: c 3, a 1, d 1; a wins the tie by label
    CHECK(top.node_labels == std::vector<std::string>{"a", "c"});
    CHECK(top.periods() == seq.periods());
    CHECK(top.deltas[1](0, 1) == 1.0);
    CHECK(top.deltas[5].sum() == 0.0);

    const auto all = restrict_top_placers(seq, 4, {0, seq.periods()});
    CHECK(all.node_labels == seq.node_labels);
    for (std::size_t t = 0; t < seq.periods(); ++t)
        CHECK(all.deltas[t] == seq.deltas[t]);
    CHECK_THROWS_AS(restrict_top_placers(seq, 5, w), DomainError);
}

TEST_CASE("labeled matrices") {
    std::istringstream in(",b,a\na,1,0.5\nb,0,2\n");
    const Matrix a = read_labeled_matrix(in, {"a", "b"});
    CHECK(a == (Matrix(2, 2) << 0.5, 1, 2, 0).finished());
    std::istringstream bad(",a,z\na,1,0\nz,0,1\n");
    CHECK_THROWS_AS(read_labeled_matrix(bad, {"a", "b"}), FormatError);
    std::istringstream neg(",a,b\na,1,-1\nb,0,1\n");
    CHECK_THROWS_AS(read_labeled_matrix(neg, {"a", "b"}), DomainError);
}

TEST_CASE("record validation") {
    CHECK(valid_label("Node_1.x-2"));
    CHECK_FALSE(valid_label("a,b"));
    CHECK_FALSE(valid_label(""));
    CHECK_THROWS_AS(from_records({}), DomainError);
    CHECK_THROWS_AS(from_records({{"1", "a", "b", 0}}), DomainError);
}
