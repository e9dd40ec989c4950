/* C interface of the dynamics/compliance engine. All functions are
 * synchronous; strings returned as char* are heap-allocated and must be
 * released with seaqt_string_free. Error details for the calling thread are
 * available via seaqt_last_error. */
#ifndef SEAQT_SEAQT_H
#define SEAQT_SEAQT_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SEAQT_OK = 0,
  SEAQT_CHECK_FAILED = 2,   /* scenario ran; some non-info check failed */
  SEAQT_SCENARIO_ERROR = 3, /* schema/physics/runtime error, see last_error */
  SEAQT_INVALID_ARGUMENT = 4,
  SEAQT_INTERNAL_ERROR = 5
} seaqt_status;

/* Opaque compliance report handle. */
typedef struct seaqt_report seaqt_report;

/* Parses and validates a scenario file without running it. */
seaqt_status seaqt_scenario_validate(const char* path);

/* Runs a scenario file and writes its report JSON and trajectory CSV
 * artifacts. report_path / csv_path override the scenario's output paths when
 * non-NULL and non-empty. On SEAQT_OK or SEAQT_CHECK_FAILED, *out_report (if
 * non-NULL) receives a handle the caller frees with seaqt_report_free. */
seaqt_status seaqt_scenario_run(const char* path, const char* report_path,
                                const char* csv_path,
                                seaqt_report** out_report);

/* Runs every *.json scenario in dir, writes the aggregate summary JSON
 * (summary_path, or "suite_summary.json" when NULL/empty), and stores the
 * text table in *out_table when non-NULL. jobs is a hint; execution order is
 * deterministic by scenario id regardless. */
seaqt_status seaqt_suite_run(const char* dir, int jobs,
                             const char* summary_path, char** out_table);

/* Report accessors. Index-based getters return -1 on a bad index. */
int seaqt_report_condition_count(const seaqt_report* report);
int seaqt_report_condition_id(const seaqt_report* report, int index);
/* 0 = pass, 1 = fail, 2 = info. */
int seaqt_report_condition_status(const seaqt_report* report, int index);
int seaqt_report_pass_count(const seaqt_report* report);
/* 1 when every non-info check passes, else 0. */
int seaqt_report_all_pass(const seaqt_report* report);

/* Deterministic JSON (sorted keys) / human-readable table of a report. */
char* seaqt_report_to_json(const seaqt_report* report);
char* seaqt_report_to_text(const seaqt_report* report);

void seaqt_report_free(seaqt_report* report);
void seaqt_string_free(char* s);

/* Message describing the most recent failure on this thread ("" if none). */
const char* seaqt_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* SEAQT_SEAQT_H */
