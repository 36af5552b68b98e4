#pragma once

#include "mfl/config.hpp"
#include "mfl/manifest.hpp"

namespace mfl {

/// Runs the configured experiment end to end: stages in dependency order,
/// every CSV/SVG written atomically into cfg.output_dir, and a manifest
/// (manifest.json) recording stage status, wall clock, and output checksums.
///
/// On a stage failure the manifest is still written with the failed status
/// and all prior outputs preserved, then the error is rethrown so callers can
/// map it to an exit code.  Identical (config, seed) produce byte-identical
/// CSV/SVG outputs.
RunManifest execute(const ExperimentConfig& cfg);

} // namespace mfl
