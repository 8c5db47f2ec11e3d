#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "erb/replay.hpp"

namespace erb {

// ERB-JSONL: one header object line, then one record object line per
// experience. Floats round-trip bit-exactly.
void serialize_erb(const ReplayBuffer& buffer, std::ostream& out);
void serialize_erb(const CompressedERB& buffer, std::ostream& out);

using AnyErb = std::variant<ReplayBuffer, CompressedERB>;

// Reads either kind, dispatching on the header's "kind" field, and validates
// all invariants. Throws FormatError on malformed input.
AnyErb deserialize_erb(std::istream& in);

// File helpers. Throw IoError when the file cannot be opened or written.
AnyErb load_erb(const std::string& path);
ReplayBuffer load_raw_erb(const std::string& path);
CompressedERB load_compressed_erb(const std::string& path);
void save_erb(const ReplayBuffer& buffer, const std::string& path);
void save_erb(const CompressedERB& buffer, const std::string& path);

// Shortest decimal rendering that parses back to the same double.
std::string format_double(double v);

} // namespace erb
