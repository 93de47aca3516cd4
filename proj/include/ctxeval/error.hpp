#pragma once

#include <stdexcept>
#include <string>

namespace ctxeval {

/// Base class for all domain errors raised by this library. The CLI maps
/// any Error to exit code 1; usage problems exit with 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// knowledge_base
class RegistryLoadError : public Error { public: using Error::Error; };
class InvalidVersion : public Error { public: using Error::Error; };

// source_extractor
class IoError : public Error { public: using Error::Error; };

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int col)
        : Error(msg + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")"),
          line(line), col(col) {}
    int line = 0;
    int col = 0;
};

// context_analyzer / exec_harness
class InvalidTarget : public Error { public: using Error::Error; };
class EmptyCorpus : public Error { public: using Error::Error; };

// testgraph
class UnknownFunction : public Error { public: using Error::Error; };
class DriverSynthesisError : public Error { public: using Error::Error; };

// exec_harness
class HarnessError : public Error { public: using Error::Error; };

// metrics
class InvalidK : public Error { public: using Error::Error; };
class NoTokens : public Error { public: using Error::Error; };

// prompt_candidates
class MissingDocstring : public Error { public: using Error::Error; };
class DuplicateSample : public Error { public: using Error::Error; };
class ProviderError : public Error { public: using Error::Error; };

// tasks_io_cli
class ValidationError : public Error { public: using Error::Error; };
class ConsistencyError : public Error { public: using Error::Error; };
class VersionError : public Error { public: using Error::Error; };

} // namespace ctxeval
