#pragma once

#include <string>

#include "rwprior/tensor.hpp"

namespace rwprior {

enum class PgmFormat { Ascii /* P2 */, Binary /* P5 */ };

/// Writes a (1, 1, H, W) image with values in [0, 1] (clamped) as 8-bit PGM.
void write_pgm(const std::string& path, const Tensor& image, PgmFormat format = PgmFormat::Binary);

/// Reads a P2 or P5 PGM (maxval up to 65535) into a (1, 1, H, W) tensor scaled to [0, 1].
Tensor read_pgm(const std::string& path);

}  // namespace rwprior
