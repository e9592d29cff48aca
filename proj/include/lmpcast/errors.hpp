#pragma once

#include <stdexcept>
#include <string>

namespace lmpcast {

// Base of every error the library raises. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

#define LMPCAST_DEFINE_ERROR(Name)                                                                                  \
	class Name : public Error {                                                                                    \
	public:                                                                                                        \
		using Error::Error;                                                                                        \
	}

LMPCAST_DEFINE_ERROR(InvalidSeries);
LMPCAST_DEFINE_ERROR(NonPositiveArgument);
LMPCAST_DEFINE_ERROR(AlignmentError);
LMPCAST_DEFINE_ERROR(DegenerateSeries);
LMPCAST_DEFINE_ERROR(SeriesTooShort);
LMPCAST_DEFINE_ERROR(InsufficientPresample);
LMPCAST_DEFINE_ERROR(UnstableParameters);
LMPCAST_DEFINE_ERROR(InvalidParameters);
LMPCAST_DEFINE_ERROR(MissingExogenousFuture);
LMPCAST_DEFINE_ERROR(EstimationFailed);
LMPCAST_DEFINE_ERROR(AllTermsExcluded);
LMPCAST_DEFINE_ERROR(MismatchedWindows);
LMPCAST_DEFINE_ERROR(SchemaError);
LMPCAST_DEFINE_ERROR(GapError);
LMPCAST_DEFINE_ERROR(IoError);
LMPCAST_DEFINE_ERROR(ConfigError);

#undef LMPCAST_DEFINE_ERROR

class ParseError : public Error {
public:
	ParseError(const std::string &what, std::size_t line)
	    : Error("line " + std::to_string(line) + ": " + what), line_(line) {
	}
	std::size_t line() const {
		return line_;
	}

private:
	std::size_t line_;
};

} // namespace lmpcast
