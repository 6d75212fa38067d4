#ifndef RDF_MESSAGES_H
#define RDF_MESSAGES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum RdfmStatus {
  RDFM_STATUS_OK = 0,
  RDFM_STATUS_INVALID_ARGUMENT = 1,
  RDFM_STATUS_SYNTAX = 2,
  RDFM_STATUS_IO = 3,
  RDFM_STATUS_NOT_FOUND = 4,
  RDFM_STATUS_ALREADY_EXISTS = 5,
  RDFM_STATUS_INDEX_CORRUPT = 6,
  RDFM_STATUS_VERSION_UNSUPPORTED = 7,
  RDFM_STATUS_OUT_OF_RANGE = 8,
  RDFM_STATUS_READ_ONLY = 9,
  RDFM_STATUS_INVALID_MESSAGE = 10,
  RDFM_STATUS_PANIC = 11,
} RdfmStatus;

// Serialization format.
typedef enum RdfmFormat {
  RDFM_FORMAT_TRIGM = 0,
  RDFM_FORMAT_NQM = 1,
} RdfmFormat;

// An open message log.
typedef struct RdfmLog RdfmLog;

// One message.
typedef struct RdfmMessage RdfmMessage;

// An ordered list of messages.
typedef struct RdfmMessageList RdfmMessageList;

// Incremental TriG-Messages parser.
typedef struct RdfmParser RdfmParser;

// Bytes owned by the library.
typedef struct RdfmBuffer {
  uint8_t *data;
  size_t len;
} RdfmBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null. Valid until
// the next library call on the same thread.
const char *rdfm_last_error(void);

// # Safety
// `buffer` must come from this library and not have been freed.
void rdfm_buffer_free(struct RdfmBuffer buffer);

// Parses a whole document into a message list.
//
// # Safety
// `data` must point to `len` readable bytes; `out` must be writable.
enum RdfmStatus rdfm_parse(enum RdfmFormat format,
                           const uint8_t *data,
                           size_t len,
                           bool require_version,
                           struct RdfmMessageList **out);

// # Safety
// `out` must be writable.
enum RdfmStatus rdfm_parser_new(bool require_version, struct RdfmParser **out);

// Feeds bytes; messages completed by them are returned in `out` (possibly
// an empty list). After an error the parser only reports that error.
//
// # Safety
// `parser` must be live; `data` must point to `len` readable bytes.
enum RdfmStatus rdfm_parser_feed(struct RdfmParser *parser,
                                 const uint8_t *data,
                                 size_t len,
                                 struct RdfmMessageList **out);

// Signals end of input and returns any final message.
//
// # Safety
// `parser` must be live; `out` must be writable.
enum RdfmStatus rdfm_parser_finish(struct RdfmParser *parser, struct RdfmMessageList **out);

// Quads read since the last emitted message.
//
// # Safety
// `parser` must be live or null.
size_t rdfm_parser_pending_quads(const struct RdfmParser *parser);

// # Safety
// `parser` must come from [`rdfm_parser_new`] and not have been freed.
void rdfm_parser_free(struct RdfmParser *parser);

// # Safety
// `list` must be live or null.
size_t rdfm_message_list_len(const struct RdfmMessageList *list);

// Copies message `index` into a new handle.
//
// # Safety
// `list` must be live; `out` must be writable.
enum RdfmStatus rdfm_message_list_get(const struct RdfmMessageList *list,
                                      size_t index,
                                      struct RdfmMessage **out);

// Serializes the whole list as a document.
//
// # Safety
// `list` must be live; `out` must be writable.
enum RdfmStatus rdfm_message_list_write(const struct RdfmMessageList *list,
                                        enum RdfmFormat format,
                                        struct RdfmBuffer *out);

// Merges every message of the list into one, renaming clashing blank nodes.
//
// # Safety
// `list` must be live; `out` must be writable.
enum RdfmStatus rdfm_message_list_union(const struct RdfmMessageList *list,
                                        struct RdfmMessage **out);

// # Safety
// `list` must come from this library and not have been freed.
void rdfm_message_list_free(struct RdfmMessageList *list);

// # Safety
// `message` must be live or null.
size_t rdfm_message_quad_count(const struct RdfmMessage *message);

// Number of distinct blank nodes.
//
// # Safety
// `message` must be live or null.
size_t rdfm_message_blank_node_count(const struct RdfmMessage *message);

// Writes true to `out` when the messages are equal up to blank node names.
//
// # Safety
// `a` and `b` must be live; `out` must be writable.
enum RdfmStatus rdfm_message_isomorphic(const struct RdfmMessage *a,
                                        const struct RdfmMessage *b,
                                        bool *out);

// Replaces blank nodes with `<base>/.well-known/genid/<id>/<label>`.
//
// # Safety
// `message` must be live; `base` and `message_id` must be NUL-terminated.
enum RdfmStatus rdfm_message_skolemize(const struct RdfmMessage *message,
                                       const char *base,
                                       const char *message_id,
                                       struct RdfmMessage **out);

// Serializes one message as a complete single-message document.
//
// # Safety
// `message` must be live; `out` must be writable.
enum RdfmStatus rdfm_message_write(const struct RdfmMessage *message,
                                   enum RdfmFormat format,
                                   struct RdfmBuffer *out);

// # Safety
// `message` must come from this library and not have been freed.
void rdfm_message_free(struct RdfmMessage *message);

// Creates a new empty log at `path` (plus `path.idx`).
//
// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum RdfmStatus rdfm_log_create(const char *path, bool sync, struct RdfmLog **out);

// Opens an existing log, recovering from a torn tail in writer mode.
//
// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum RdfmStatus rdfm_log_open(const char *path, bool writer, bool paranoid, struct RdfmLog **out);

// # Safety
// `log` must be live or null.
uint64_t rdfm_log_len(const struct RdfmLog *log);

// Appends a message; its sequence number goes to `seq` when non-null.
//
// # Safety
// `log` and `message` must be live; `seq` must be writable or null.
enum RdfmStatus rdfm_log_append(struct RdfmLog *log,
                                const struct RdfmMessage *message,
                                uint64_t *seq);

// # Safety
// `log` must be live; `out` must be writable.
enum RdfmStatus rdfm_log_read(const struct RdfmLog *log, uint64_t seq, struct RdfmMessage **out);

// Reads messages `from..=to` in order.
//
// # Safety
// `log` must be live; `out` must be writable.
enum RdfmStatus rdfm_log_replay(const struct RdfmLog *log,
                                uint64_t from,
                                uint64_t to,
                                struct RdfmMessageList **out);

// Re-derives the index from the data file and compares it with the stored one.
//
// # Safety
// `log` must be live.
enum RdfmStatus rdfm_log_verify(const struct RdfmLog *log);

// # Safety
// `log` must come from this library and not have been freed.
void rdfm_log_free(struct RdfmLog *log);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDF_MESSAGES_H */
