#include "kgbench/log.hpp"
#include "kgbench/error.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace kgbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::InvalidId: return "InvalidId";
    case ErrorCode::OverlappingSplits: return "OverlappingSplits";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyReport: return "EmptyReport";
    case ErrorCode::Io: return "Io";
    case ErrorCode::UndeclaredRelation: return "UndeclaredRelation";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::InfeasibleSplit: return "InfeasibleSplit";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::ExhaustedCandidates: return "ExhaustedCandidates";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::UnseenEntity: return "UnseenEntity";
    case ErrorCode::InvariantViolated: return "InvariantViolated";
  }
  return "Unknown";
}

namespace log {
namespace {
std::atomic<Level> g_level{Level::Info};
std::mutex g_mutex;

const char* tag(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    case Level::Off: break;
  }
  return "";
}
}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void write(Level level, std::string_view message) {
  std::lock_guard lock(g_mutex);
  fmt::print(stderr, "[kgbench {}] {}\n", tag(level), message);
}

}  // namespace log
}  // namespace kgbench
