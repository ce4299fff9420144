// etcjpeg.hpp - umbrella header.
#pragma once

#include "etcjpeg/cipher.hpp"
#include "etcjpeg/corpus.hpp"
#include "etcjpeg/errors.hpp"
#include "etcjpeg/eval.hpp"
#include "etcjpeg/fileio.hpp"
#include "etcjpeg/image.hpp"
#include "etcjpeg/jpeg.hpp"
#include "etcjpeg/jpeg_dsp.hpp"
#include "etcjpeg/jpeg_tables.hpp"
#include "etcjpeg/keystream.hpp"
#include "etcjpeg/ppm.hpp"
#include "etcjpeg/sns.hpp"
