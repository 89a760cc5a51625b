#pragma once

namespace muxillum {

/// Camera gain (amplitude dB) and exposure time (ms).
struct CameraSettings {
    double gain_db = 0.0;
    double exposure_ms = 1.0;

    friend bool operator==(const CameraSettings&, const CameraSettings&) = default;
};

/// Throws ParameterError unless exposure is positive and both values finite.
void validate(const CameraSettings& s);

}  // namespace muxillum
