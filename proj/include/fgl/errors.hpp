#pragma once

#include <stdexcept>
#include <string>

namespace fgl {

// Base of every error thrown by the library. Each subclass names one failure
// mode so callers can catch precisely what they can handle.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FGL_DEFINE_ERROR(Name)                                                 \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {}       \
  }

// quadgraph
FGL_DEFINE_ERROR(DegenerateOffsets);
FGL_DEFINE_ERROR(MalformedFace);
FGL_DEFINE_ERROR(GraphFormatError);

// spectral
FGL_DEFINE_ERROR(InvalidSpectralData);
FGL_DEFINE_ERROR(PoleEvaluation);
FGL_DEFINE_ERROR(DegenerateDirections);

// operators
FGL_DEFINE_ERROR(MissingNeighbor);
FGL_DEFINE_ERROR(MissingVertexValue);
FGL_DEFINE_ERROR(BoundaryVertex);

// quasimomentum
FGL_DEFINE_ERROR(SaddleLevel);
FGL_DEFINE_ERROR(ResolutionTooCoarse);
FGL_DEFINE_ERROR(NonFiniteDensity);
FGL_DEFINE_ERROR(PointOnContour);

// green
FGL_DEFINE_ERROR(DegenerateDifference);
FGL_DEFINE_ERROR(PoleTooCloseToContour);
FGL_DEFINE_ERROR(ZeroWeightSum);

// theta
FGL_DEFINE_ERROR(InvalidPeriodMatrix);
FGL_DEFINE_ERROR(TruncationOverflow);
FGL_DEFINE_ERROR(ThetaZeroDenominator);

// cli_io
FGL_DEFINE_ERROR(ConfigError);
FGL_DEFINE_ERROR(IoError);

#undef FGL_DEFINE_ERROR

}  // namespace fgl
