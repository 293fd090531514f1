#pragma once

#include <stdexcept>
#include <string>

namespace coeye {

// Base of every library error. The category drives the CLI exit code.
class Error : public std::runtime_error {
public:
    enum class Category { Data, Training, Shape, Model, Usage };

    Error(Category category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    Category category() const noexcept { return category_; }

private:
    Category category_;
};

#define COEYE_DEFINE_ERROR(Name, Cat)                                   \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& what)                          \
            : Error(Category::Cat, std::string(#Name ": ") + what) {}   \
    };

// data
COEYE_DEFINE_ERROR(RaggedData, Data)
COEYE_DEFINE_ERROR(ParseError, Data)
COEYE_DEFINE_ERROR(EmptyDataset, Data)
COEYE_DEFINE_ERROR(IoError, Data)

// symbolic
COEYE_DEFINE_ERROR(InvalidWordSize, Usage)
COEYE_DEFINE_ERROR(InvalidAlphabet, Usage)
COEYE_DEFINE_ERROR(InvalidArgument, Usage)

// forest
COEYE_DEFINE_ERROR(EmptyTrainingSet, Training)
COEYE_DEFINE_ERROR(FeatureMismatch, Shape)

// resample
COEYE_DEFINE_ERROR(NoMinorityClass, Training)

// lenses
COEYE_DEFINE_ERROR(NoFeasibleLens, Training)

// model
COEYE_DEFINE_ERROR(EmptyEnsemble, Training)
COEYE_DEFINE_ERROR(SeriesLengthMismatch, Shape)
COEYE_DEFINE_ERROR(UnsupportedModelVersion, Model)
COEYE_DEFINE_ERROR(ModelParseError, Model)

// eval
COEYE_DEFINE_ERROR(UnknownLabel, Data)

#undef COEYE_DEFINE_ERROR

}  // namespace coeye
