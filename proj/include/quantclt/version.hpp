#pragma once

#define QUANTCLT_VERSION "0.1.0"
