#pragma once

#include "ltesim/message.h"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ltesim {

/// Raised by decode_record; field() names the first key that could not be read.
class MalformedLine : public std::runtime_error {
 public:
  MalformedLine(std::string field, const std::string& detail) :
    std::runtime_error("malformed trace line at field '" + field + "': " + detail), field_(std::move(field))
  {
  }
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// One record per line:
///   t=<ms> cell=<cell|-> dir=<dl|ul|local> src=<actor> dst=<actor> kind=<Kind> ip=<0|1> ci=<0|1> ...
/// followed by the kind-specific keys in a fixed order.
std::string encode_record(const TraceRecord& record);
TraceRecord decode_record(std::string_view line);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);
/// Reads a whole trace; errors carry the 1-based line number in the message.
std::vector<TraceRecord> read_trace(std::istream& in);

}  // namespace ltesim
