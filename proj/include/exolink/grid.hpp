#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exolink/design.hpp"
#include "exolink/problem.hpp"

namespace exo {

struct GridSpec {
    DesignBounds bounds;
    std::vector<double> steps;  // mm per variable; empty = 1.0 everywhere

    std::vector<std::uint64_t> axis_counts() const;  // floor(w/step) + 1
    /** Design at a linear index (row-major, first variable slowest). */
    DesignVector point_at(std::uint64_t index) const;
    /** Stable content hash used to pair checkpoints with their spec. */
    std::uint64_t hash() const;
};

/** Exact number of grid points; throws std::overflow_error past 2^64-1. */
std::uint64_t grid_cardinality(const GridSpec& spec);

struct GridCheckpoint {
    std::uint64_t next_index = 0;   // first index not yet evaluated
    std::uint64_t visited = 0;
    bool has_best = false;
    EvaluationOutcome best;
    std::uint64_t spec_hash = 0;
};

GridCheckpoint load_checkpoint(const std::string& path);
void save_checkpoint(const GridCheckpoint& c, const std::string& path);

struct GridOptions {
    std::uint64_t safety_cap = 10'000'000;  // refuse larger runs unless force
    bool force = false;
    std::string checkpoint_path;            // empty = no checkpointing
    std::uint64_t checkpoint_interval = 100'000;  // points between writes
    int workers = 1;
    std::optional<std::uint64_t> stop_after;  // for tests: pause mid-run
};

struct GridResult {
    bool has_best = false;
    EvaluationOutcome best;
    std::uint64_t visited = 0;
    std::uint64_t cardinality = 0;
    bool stopped_early = false;  // stop_after hit; checkpoint written
};

/**
 * Exhaustive enumeration in fixed lexicographic order with deb_compare
 * reduction. Refuses to start above the safety cap (with a runtime estimate)
 * unless forced; resumes from a checkpoint when one is supplied.
 * Checkpoint/spec mismatches throw std::runtime_error.
 */
GridResult run_grid(const GridSpec& spec, const ObjectiveFn& problem,
                    const GridOptions& opts = {},
                    const GridCheckpoint* resume_from = nullptr);

}  // namespace exo
