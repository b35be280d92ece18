#pragma once

#include "etea/analysis.hpp"
#include "etea/bytes.hpp"
#include "etea/cipher.hpp"
#include "etea/codec.hpp"
#include "etea/error.hpp"
#include "etea/fileio.hpp"
#include "etea/keyfile.hpp"
#include "etea/stego.hpp"
#include "etea/transfer.hpp"
