/** Wire types for the news agent HTTP API. */

export interface SuggestionItem {
  number: number;
  key: string;
  title: string;
}

export interface DebugBlock {
  intent: string;
  confidence: number;
  session_state: string;
}

export interface AgentResponse {
  text: string;
  ssml: string;
  suggestions: SuggestionItem[];
  directives: string[];
  debug?: DebugBlock | null;
}

export interface CreateSessionResponse {
  session_id: string;
  response: AgentResponse;
}

export type PlaybackState = 'idle' | 'speaking' | 'paused';

export type Directive = 'next' | 'again' | 'pause' | 'play';

export interface Settings {
  rate: number;
  voice: string | null;
  language: string;
  textOnly: boolean;
}

export interface TranscriptEntry {
  speaker: 'user' | 'agent';
  text: string;
}
