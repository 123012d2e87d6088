/** Payload shapes of the triage service REST API. */

export interface LayoutPoint {
  concept_id: string;
  x: number;
  y: number;
  font_scale: number;
  opacity: number;
}

export type LayoutStatus = 'available' | 'unavailable' | 'building';

export interface LayoutResponse {
  version: number | null;
  status: LayoutStatus;
  points: LayoutPoint[];
}

export interface Concept {
  id: string;
  phrase: string;
  rake_score: number;
  mention_count: number;
  report_ids: string[];
  custom: boolean;
}

export interface ConceptsResponse {
  version: number;
  concepts: Concept[];
}

export interface Report {
  id: string;
  instance_ref: string;
  model_output: string;
  ground_truth: string | null;
  text: string;
  source: string;
  created_at: string;
}

export interface ReportsPage {
  items: Report[];
  total: number;
  page: number;
  page_size: number;
}

export interface HypothesisInfo {
  id: string;
  name: string;
  created_at: string;
  updated_at: string;
  attached_report_ids: string[];
  additional_count: number;
  modified_count: number;
}

export interface ValiditySummary {
  additional_accuracy: number | null;
  additional_counts: { correct: number; incorrect: number; unlabeled: number };
  modified_expected_rate: number | null;
  modified_counts: { as_expected: number; not_as_expected: number; unlabeled: number };
}

export interface SearchResultItem {
  provider_id: string;
  remote_url: string;
  attribution: string;
  license: string;
}

export interface EvidenceItem {
  id: string;
  instance_ref: string;
  model_output: { label_or_caption: string; confidence?: number };
  origin: string;
  verdict: string;
}
