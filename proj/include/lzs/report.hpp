#pragma once

// SpectroscopyFit reports. The key-value form is one `key=value` per line;
// list keys end in `[]` and repeat once per element, gap estimates are
// written as `location,gap`. Missing values print as nan.

#include <iosfwd>
#include <string>

#include "lzs/analysis.hpp"

namespace lzs {

void write_fit_report_text(std::ostream& out, const SpectroscopyFit& fit);
void write_fit_report_kv(std::ostream& out, const SpectroscopyFit& fit);

/// Inverse of write_fit_report_kv; throws SchemaError on malformed lines.
SpectroscopyFit read_fit_report_kv(std::istream& in);

}  // namespace lzs
