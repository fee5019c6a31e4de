#include "svtakit/error.hpp"

namespace svtakit {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownSymbol: return "UnknownSymbol";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::AlphabetMismatch: return "AlphabetMismatch";
    case Errc::BadRank: return "BadRank";
    case Errc::Diverged: return "Diverged";
    case Errc::MaxIterations: return "MaxIterations";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::RankZero: return "RankZero";
    case Errc::DuplicateRule: return "DuplicateRule";
    case Errc::NameClash: return "NameClash";
    case Errc::EmptyBank: return "EmptyBank";
    case Errc::EmptyString: return "EmptyString";
    case Errc::EmptyTestSet: return "EmptyTestSet";
    case Errc::NegativeRadicand: return "NegativeRadicand";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace svtakit
