#pragma once

#include <cstddef>
#include <vector>

#include "bagrasp/proposal.hpp"

namespace bagrasp {

/// Time-ordered buffer of published grasp proposals.
///
/// Not synchronized: push and queries must come from one thread (the episode
/// loop). Query results are independent snapshots.
class ProposalBuffer {
public:
    explicit ProposalBuffer(double window = 10.0, double distance_threshold = 0.02)
        : window_(window), distance_threshold_(distance_threshold) {}

    /// Throws Error(OutOfOrderTimestamp) if p is older than the latest entry.
    void push(const GraspProposal& p);

    /// Drops entries with now - t > window (the boundary itself is kept).
    void window_filter(double now);

    const std::vector<GraspProposal>& proposals() const { return proposals_; }
    std::size_t size() const { return proposals_.size(); }
    bool empty() const { return proposals_.empty(); }
    double window() const { return window_; }
    double distance_threshold() const { return distance_threshold_; }

private:
    double window_;
    double distance_threshold_;
    std::vector<GraspProposal> proposals_;
};

/// Indices into the input list; clusters ordered by their smallest index,
/// members ascending.
using Cluster = std::vector<std::size_t>;

/// Single-linkage: connected components of the graph joining proposals whose
/// targets lie within `threshold` meters of each other.
std::vector<Cluster> cluster(const std::vector<GraspProposal>& proposals, double threshold);

/// Largest cluster (ties: latest newest-member timestamp, then first listed).
/// Returns its centroid, the mean theta of the most populated theta bin
/// (bins of `theta_bin_deg` degrees; ties go to the bin holding the smallest
/// |theta|), and the newest member timestamp. Throws Error(NoProposals).
GraspProposal select(const std::vector<GraspProposal>& proposals,
                     const std::vector<Cluster>& clusters, double theta_bin_deg = 5.0);

/// window_filter(now), cluster, select.
GraspProposal denoise(ProposalBuffer& buffer, double now, double theta_bin_deg = 5.0);

}  // namespace bagrasp
