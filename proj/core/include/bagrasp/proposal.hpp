#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace bagrasp {

/// Candidate top-down grasp: workspace (x, y) in meters, yaw about world z in
/// (-pi/2, pi/2], and the time it was published.
struct GraspProposal {
    Eigen::Vector2d target = Eigen::Vector2d::Zero();
    double theta = 0.0;
    double timestamp = 0.0;

    bool operator==(const GraspProposal&) const = default;
};

/// Maps any angle onto the parallel-jaw equivalent in (-pi/2, pi/2].
double wrap_half_turn(double theta);

/// {"x":...,"y":...,"theta":...,"t":...} on one line, full double precision.
std::string to_json_line(const GraspProposal& p);

/// Throws Error(ParseError) on malformed input.
GraspProposal parse_json_line(const std::string& line);

/// Reads one proposal per non-blank line.
std::vector<GraspProposal> read_json_lines(std::istream& in);

}  // namespace bagrasp
