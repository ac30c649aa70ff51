#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "approxnfa/nfa.hpp"

namespace approxnfa {

// Text format, line oriented:
//
//   initial <id>
//   states <count>                 (optional; inferred from the largest id otherwise)
//   <src> <dst> <symspec>          symspec: 0xNN | 0xNN-0xMM, comma-joined
//   final <id> <id> ...            last non-empty line, list may be empty
//
// '#' starts a comment. Lines of the form "#@name <id> <text>" and
// "#@tag <id> <rule>" carry state annotations; other readers see comments.

Nfa parse_nfa(std::istream& in);
Nfa parse_nfa(const std::string& text);
void write_nfa(const Nfa& nfa, std::ostream& out);
std::string to_text(const Nfa& nfa);

Nfa read_nfa(const std::filesystem::path& path);
void write_nfa(const Nfa& nfa, const std::filesystem::path& path);

/// Renders a byte class as a symspec ("0x61-0x63,0x78").
std::string format_symspec(const ByteClass& cls);
/// Parses a symspec; throws ParseError on malformed input.
ByteClass parse_symspec(const std::string& spec, std::size_t line = 0);

/// FNV-1a over the canonical text without annotations. Used to pair
/// persisted labelings with the automaton they were computed on.
std::uint64_t nfa_hash(const Nfa& nfa);
std::string nfa_hash_hex(const Nfa& nfa);

} // namespace approxnfa
