// Copyright 2026 The Graphcell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphcell {

enum class Errc {
  // codec
  buffer_underflow,
  malformed_container,
  unsupported_field,
  dangling_backref,
  // registry
  unknown_type_id,
  bad_cast,
  empty_handle,
  // transport
  spawn_failure,
  digest_mismatch,
  invalid_rank,
  group_shutdown,
  unknown_handler,
  no_jobs_outstanding,
  protocol_violation,
  // graph
  bad_id,
  duplicate_id,
  no_local_copy,
  infeasible_balance,
  // simbench
  agent_escaped,
  config_error,
};

constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::buffer_underflow: return "BufferUnderflow";
    case Errc::malformed_container: return "MalformedContainer";
    case Errc::unsupported_field: return "UnsupportedField";
    case Errc::dangling_backref: return "DanglingBackref";
    case Errc::unknown_type_id: return "UnknownTypeId";
    case Errc::bad_cast: return "BadCast";
    case Errc::empty_handle: return "EmptyHandle";
    case Errc::spawn_failure: return "SpawnFailure";
    case Errc::digest_mismatch: return "DigestMismatch";
    case Errc::invalid_rank: return "InvalidRank";
    case Errc::group_shutdown: return "GroupShutdown";
    case Errc::unknown_handler: return "UnknownHandler";
    case Errc::no_jobs_outstanding: return "NoJobsOutstanding";
    case Errc::protocol_violation: return "ProtocolViolation";
    case Errc::bad_id: return "BadId";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::no_local_copy: return "NoLocalCopy";
    case Errc::infeasible_balance: return "InfeasibleBalance";
    case Errc::agent_escaped: return "AgentEscaped";
    case Errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

/// The single exception type thrown by the library. `code()` identifies the
/// failure; `what()` carries "Name: detail".
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string_view detail)
      : std::runtime_error(compose(code, detail)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  static std::string compose(Errc code, std::string_view detail) {
    std::string s(errc_name(code));
    if (!detail.empty()) {
      s += ": ";
      s += detail;
    }
    return s;
  }

  Errc code_;
};

[[noreturn]] inline void fail(Errc code, std::string_view detail = {}) {
  throw Error(code, detail);
}

}  // namespace graphcell
