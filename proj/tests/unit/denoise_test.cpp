#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "bagrasp/denoise.hpp"
#include "bagrasp/proposal.hpp"
#include "test_util.hpp"

using namespace bagrasp;
using bagrasp::testing::error_code_of;

namespace {

GraspProposal gp(double x, double y, double theta = 0.0, double t = 0.0) {
    GraspProposal p;
    p.target = {x, y};
    p.theta = theta;
    p.timestamp = t;
    return p;
}

// Transitive closure of the threshold relation by repeated relaxation.
std::vector<int> closure_labels(const std::vector<GraspProposal>& ps, double threshold) {
    const std::size_t n = ps.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) reach[i][j] = (ps[i].target - ps[j].target).norm() <= threshold;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) {
        label[i] = static_cast<int>(i);
        for (std::size_t j = 0; j < i; ++j)
            if (reach[i][j]) {
                label[i] = label[j];
                break;
            }
    }
    return label;
}

std::set<std::set<std::size_t>> as_partition(const std::vector<Cluster>& cs) {
    std::set<std::set<std::size_t>> out;
    for (const auto& c : cs) out.insert(std::set<std::size_t>(c.begin(), c.end()));
    return out;
}

std::vector<GraspProposal> random_proposals(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> d(0, 0.2), th(-1.5, 1.5);
    std::vector<GraspProposal> ps;
    for (int i = 0; i < n; ++i) ps.push_back(gp(d(rng), d(rng), th(rng), i));
    return ps;
}

}  // namespace

TEST(ProposalBuffer, PushAndOrdering) {
    ProposalBuffer b;
    b.push(gp(0, 0, 0, 7));
    EXPECT_EQ(b.size(), 1u);
    EXPECT_EQ(error_code_of([&] { b.push(gp(0, 0, 0, 5)); }), ErrorCode::OutOfOrderTimestamp);
    b.push(gp(0, 0, 0, 7));  // equal timestamps are fine
    ProposalBuffer many;
    for (int i = 0; i < 100; ++i) many.push(gp(i, 0, 0, i));
    EXPECT_EQ(many.size(), 100u);
}

TEST(ProposalBuffer, WindowFilterClosedBoundary) {
    ProposalBuffer b(10.0);
    for (double t : {0.0, 1.0, 5.0, 11.0}) b.push(gp(0, 0, 0, t));
    b.window_filter(11.0);
    std::vector<double> kept;
    for (const auto& p : b.proposals()) kept.push_back(p.timestamp);
    EXPECT_EQ(kept, (std::vector<double>{1.0, 5.0, 11.0}));
}

TEST(ProposalBuffer, WindowFilterEdgeCases) {
    ProposalBuffer b(10.0);
    for (double t : {3.0, 4.0}) b.push(gp(0, 0, 0, t));
    b.window_filter(1.0);
    EXPECT_EQ(b.size(), 2u);
    ProposalBuffer empty;
    empty.window_filter(100.0);
    EXPECT_TRUE(empty.empty());
}

TEST(Cluster, Example) {
    const auto cs = cluster({gp(0, 0), gp(0.01, 0), gp(1, 1)}, 0.05);
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0], (Cluster{0, 1}));
    EXPECT_EQ(cs[1], (Cluster{2}));
}

TEST(Cluster, ThresholdExtremes) {
    std::mt19937_64 rng(1);
    const auto ps = random_proposals(rng, 15);
    EXPECT_EQ(cluster(ps, std::numeric_limits<double>::infinity()).size(), 1u);
    EXPECT_EQ(cluster(ps, 0.0).size(), 15u);
    EXPECT_TRUE(cluster({}, 0.1).empty());
}

TEST(Cluster, ChainsMergeTransitively) {
    const auto cs = cluster({gp(0, 0), gp(0.015, 0), gp(0.03, 0), gp(0.045, 0)}, 0.02);
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(cs[0].size(), 4u);
}

TEST(Cluster, MatchesTransitiveClosure) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> n(0, 20);
    std::uniform_real_distribution<double> th(0.0, 0.08);
    for (int trial = 0; trial < 500; ++trial) {
        const auto ps = random_proposals(rng, n(rng));
        const double threshold = th(rng);
        const auto labels = closure_labels(ps, threshold);
        std::vector<Cluster> oracle;
        std::vector<int> seen;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const auto it = std::find(seen.begin(), seen.end(), labels[i]);
            if (it == seen.end()) {
                seen.push_back(labels[i]);
                oracle.push_back({i});
            } else {
                oracle[it - seen.begin()].push_back(i);
            }
        }
        EXPECT_EQ(cluster(ps, threshold), oracle) << "trial " << trial;
    }
}

TEST(Cluster, PartitionAndPermutationInvariance) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto ps = random_proposals(rng, 20);
        const auto cs = cluster(ps, 0.04);
        std::vector<int> count(ps.size(), 0);
        for (const auto& c : cs)
            for (auto i : c) ++count[i];
        for (int c : count) EXPECT_EQ(c, 1);

        std::vector<std::size_t> perm(ps.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<GraspProposal> shuffled;
        for (auto i : perm) shuffled.push_back(ps[i]);
        std::set<std::set<std::size_t>> remapped;
        for (const auto& c : cluster(shuffled, 0.04)) {
            std::set<std::size_t> s;
            for (auto i : c) s.insert(perm[i]);
            remapped.insert(s);
        }
        EXPECT_EQ(remapped, as_partition(cs));
    }
}

TEST(Cluster, RaisingThresholdNeverAddsClusters) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ps = random_proposals(rng, 20);
        std::size_t prev = ps.size() + 1;
        for (double t = 0.0; t < 0.3; t += 0.01) {
            const std::size_t n = cluster(ps, t).size();
            EXPECT_LE(n, prev);
            prev = n;
        }
    }
}

TEST(Select, LargestClusterCentroid) {
    const std::vector<GraspProposal> ps{gp(0, 0, 0.2, 0), gp(0.01, 0, 0.2, 1), gp(1, 1, 0.7, 2)};
    const auto out = select(ps, cluster(ps, 0.05));
    EXPECT_LT((out.target - Eigen::Vector2d(0.005, 0)).norm(), 1e-15);
    EXPECT_EQ(out.theta, 0.2);
    EXPECT_EQ(out.timestamp, 1.0);
}

TEST(Select, IdenticalThetaIsExact) {
    const double th = 0.123456789;
    std::vector<GraspProposal> ps;
    for (int i = 0; i < 7; ++i) ps.push_back(gp(0.001 * i, 0, th, i));
    EXPECT_EQ(select(ps, cluster(ps, 0.02)).theta, th);
}

TEST(Select, ThetaModeBinMean) {
    const std::vector<GraspProposal> ps{gp(0, 0, 0.10, 0), gp(0, 0, 0.11, 1), gp(0, 0, 0.50, 2)};
    EXPECT_NEAR(select(ps, cluster(ps, 0.02)).theta, 0.105, 1e-12);
}

TEST(Select, ThetaBinTieGoesToSmallestMagnitude) {
    const std::vector<GraspProposal> ps{gp(0, 0, 0.6, 0), gp(0, 0, -0.02, 1), gp(0, 0, 0.3, 2)};
    EXPECT_EQ(select(ps, cluster(ps, 0.02)).theta, -0.02);
}

TEST(Select, ClusterSizeTieGoesToMostRecent) {
    const std::vector<GraspProposal> ps{gp(0, 0, 0, 0), gp(0.5, 0.5, 0, 1), gp(0.001, 0, 0, 2), gp(0.501, 0.5, 0, 3)};
    const auto out = select(ps, cluster(ps, 0.02));
    EXPECT_NEAR(out.target.x(), 0.5005, 1e-12);
    EXPECT_EQ(out.timestamp, 3.0);
}

TEST(Select, EmptyInputFails) {
    EXPECT_EQ(error_code_of([] { select({}, {}); }), ErrorCode::NoProposals);
    ProposalBuffer b;
    EXPECT_EQ(error_code_of([&] { denoise(b, 0.0); }), ErrorCode::NoProposals);
}

TEST(Denoise, AppliesWindowFirst) {
    ProposalBuffer b(10.0, 0.02);
    // Old cluster of three falls out of the window; the newer pair wins.
    for (int i = 0; i < 3; ++i) b.push(gp(0, 0, 0, i * 0.1));
    b.push(gp(0.3, 0.3, 0.2, 15));
    b.push(gp(0.3, 0.3, 0.2, 16));
    const auto out = denoise(b, 16.0);
    EXPECT_NEAR(out.target.x(), 0.3, 1e-15);
    EXPECT_EQ(b.size(), 2u);
}

TEST(ProposalJson, RoundTripAndErrors) {
    const GraspProposal p = gp(0.1234567890123, -0.5, 1.2, 3.25);
    EXPECT_EQ(parse_json_line(to_json_line(p)), p);
    EXPECT_EQ(error_code_of([] { parse_json_line("{\"x\":1}"); }), ErrorCode::ParseError);
    EXPECT_EQ(error_code_of([] { parse_json_line("nope"); }), ErrorCode::ParseError);
    std::istringstream in("\n" + to_json_line(p) + "\n\n" + to_json_line(gp(1, 2, 0, 4)) + "\n");
    EXPECT_EQ(read_json_lines(in).size(), 2u);
}

TEST(WrapHalfTurn, Range) {
    EXPECT_NEAR(wrap_half_turn(std::numbers::pi), 0.0, 1e-15);
    EXPECT_NEAR(wrap_half_turn(-std::numbers::pi / 2), std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(wrap_half_turn(2.0), 2.0 - std::numbers::pi, 1e-15);
    EXPECT_EQ(wrap_half_turn(0.3), 0.3);
}
