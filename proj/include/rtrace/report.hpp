#pragma once

#include <string>

#include "rtrace/config.hpp"
#include "rtrace/tracer.hpp"

namespace rtrace {

/// One CSV row per accepted continuation point:
///   branch_id,point_index,arclength,re_k,im_k,lambda,residual_norm,det_sign,state_class
/// All reals carry 15 significant digits, '.' decimal separator, 'e'
/// notation, LF line endings; no timestamps — identical studies produce
/// byte-identical files.
std::string trajectory_csv(const TracedBranch& branch);

/// Writes branch_<id>.csv per branch, events.json, and study.json (the
/// resolved configuration, branch summaries, and seed failures) into dir,
/// creating it if needed.  Throws IoError on filesystem problems.
void write_study_outputs(const std::string& dir, const StudyConfig& cfg,
                         const StudyResult& result);

/// Reads trace outputs back from dir and emits gnuplot-ready data files
/// (kplane.dat, imk_lambda.dat, rek_lambda.dat: whitespace-separated,
/// branches separated by blank lines) plus events.dat and a plot.gp script
/// for the three projections.  Throws ConfigError when dir has no trace
/// outputs and IoError on filesystem problems.
void write_plot_data(const std::string& study_dir, const std::string& out_dir);

}  // namespace rtrace
