#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "socialbot/engine.hpp"

namespace socialbot {

struct ReplOptions {
  std::uint64_t seed = 0;
  std::string user_id = "repl-user";
  bool echo = false;    // print "USER: ..." lines, for piped input
  bool prompt = false;  // print "> " before reading
  bool trace = false;   // print the scoring trace after each reply
};

/// Line-oriented chat loop. Besides plain text it understands
///   /seed N                  restart the session with seed N
///   /hypotheses a|0.9 ; b|0.4  send an n-best list
///   /state                   print the session state
///   /trace                   toggle scoring traces
///   /quit
/// Returns the number of turns taken.
int run_repl(const Engine& engine, std::istream& in, std::ostream& out, ReplOptions options);

/// Parses "text|score ; text|score". A missing score counts as 1.
AsrInput parse_hypotheses(std::string_view text);

}  // namespace socialbot
