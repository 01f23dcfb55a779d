#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsframe/certify.hpp"
#include "nsframe/windows.hpp"

namespace nsframe {

// pass/fail: compared against a published value at a fixed tolerance.
// info: computed quantity with nothing to compare against.
// flag: published value known not to follow from the stated formulas; shown
//       for comparison, never counted as a failure.
enum class RowStatus { pass, fail, info, flag };

std::string_view to_string(RowStatus status);

struct ReproRow {
  std::string name;
  double value = 0.0;
  std::optional<double> reference;
  std::optional<double> tolerance;
  RowStatus status = RowStatus::info;
  std::string note;
};

struct ReproReport {
  int example = 0;
  std::vector<ReproRow> rows;
  std::vector<std::string> notes;
  FrameCertificate reference_certificate;  // painless certificate of h
  FrameCertificate certificate;            // perturbation / almost-painless certificate of g

  bool ok() const;
  const ReproRow* find(const std::string& name) const;
};

struct ReproOptions {
  double grid_step = 0.0;  // 0: default estimate grid
  std::optional<ScaleSequence> sequence;
};

// The default dilation sequence used by both example pipelines.
ScaleSequence default_sequence(ScaleRule rule);

// Example 1: Hann chain, bandlimited by the raised-cosine filter with
// bandwidth 0.02, certified by perturbation of the painless chain.
// Example 2: Gaussian chain certified against its painless truncation.
ReproReport reproduce_example(int example, const ReproOptions& options = {});

std::string format_report(const ReproReport& report);

}  // namespace nsframe
