#pragma once

#include <string>

#include "bih/config.hpp"
#include "bih/types.hpp"

namespace bih {

struct PipelineOptions {
  std::string eigsnapshot;  // base path; ".1.bin" / ".2.bin" appended. Empty: <out>/eig
  bool parallel = true;
};

Status run_forward(const RunConfig& cfg, const PipelineOptions& opt);
Status run_verify(const RunConfig& cfg, const PipelineOptions& opt);
Status run_probe(const RunConfig& cfg, const PipelineOptions& opt);
Status run_reconstruct(const RunConfig& cfg, const PipelineOptions& opt);
Status run_stability(const RunConfig& cfg, const PipelineOptions& opt);
Status run_report(const RunConfig& cfg, const PipelineOptions& opt);

}  // namespace bih
