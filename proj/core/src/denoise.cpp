#include "bagrasp/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "bagrasp/error.hpp"

namespace bagrasp {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

void ProposalBuffer::push(const GraspProposal& p) {
    if (!proposals_.empty() && p.timestamp < proposals_.back().timestamp) {
        throw Error(ErrorCode::OutOfOrderTimestamp, "proposal timestamp older than the latest buffered one");
    }
    proposals_.push_back(p);
}

void ProposalBuffer::window_filter(double now) {
    std::erase_if(proposals_, [&](const GraspProposal& p) { return now - p.timestamp > window_; });
}

std::vector<Cluster> cluster(const std::vector<GraspProposal>& proposals, double threshold) {
    const std::size_t n = proposals.size();
    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if ((proposals[i].target - proposals[j].target).norm() <= threshold) sets.unite(i, j);

    std::map<std::size_t, Cluster> by_root;  // root is the smallest member index
    for (std::size_t i = 0; i < n; ++i) by_root[sets.find(i)].push_back(i);
    std::vector<Cluster> out;
    out.reserve(by_root.size());
    for (auto& [root, members] : by_root) out.push_back(std::move(members));
    return out;
}

GraspProposal select(const std::vector<GraspProposal>& proposals,
                     const std::vector<Cluster>& clusters, double theta_bin_deg) {
    const Cluster* best = nullptr;
    double best_latest = 0.0;
    for (const Cluster& c : clusters) {
        if (c.empty()) continue;
        double latest = proposals[c.front()].timestamp;
        for (std::size_t i : c) latest = std::max(latest, proposals[i].timestamp);
        if (!best || c.size() > best->size() || (c.size() == best->size() && latest > best_latest)) {
            best = &c;
            best_latest = latest;
        }
    }
    if (!best) throw Error(ErrorCode::NoProposals, "no proposals");

    GraspProposal out;
    out.timestamp = best_latest;
    for (std::size_t i : *best) out.target += proposals[i].target;
    out.target /= static_cast<double>(best->size());

    const double bin_width = theta_bin_deg * std::numbers::pi / 180.0;
    struct Bin {
        std::size_t count = 0;
        double first = 0.0;
        double offset_sum = 0.0;  // sum of (theta - first); exact for equal members
        double min_abs = 0.0;
    };
    std::map<long, Bin> bins;
    for (std::size_t i : *best) {
        const double th = proposals[i].theta;
        Bin& b = bins[static_cast<long>(std::floor(th / bin_width))];
        if (b.count == 0) {
            b.first = th;
            b.min_abs = std::abs(th);
        }
        b.min_abs = std::min(b.min_abs, std::abs(th));
        ++b.count;
        b.offset_sum += th - b.first;
    }
    const Bin* mode = nullptr;
    for (const auto& [key, b] : bins) {
        if (!mode || b.count > mode->count || (b.count == mode->count && b.min_abs < mode->min_abs)) {
            mode = &b;
        }
    }
    out.theta = mode->first + mode->offset_sum / static_cast<double>(mode->count);
    return out;
}

GraspProposal denoise(ProposalBuffer& buffer, double now, double theta_bin_deg) {
    buffer.window_filter(now);
    const auto clusters = cluster(buffer.proposals(), buffer.distance_threshold());
    return select(buffer.proposals(), clusters, theta_bin_deg);
}

}  // namespace bagrasp
