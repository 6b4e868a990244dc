/** Feature detection and a thin wrapper for browser speech recognition. */

type RecognitionCtor = new () => SpeechRecognitionLike;

export interface SpeechRecognitionLike {
  lang: string;
  interimResults: boolean;
  maxAlternatives: number;
  onresult: ((event: { results: ArrayLike<ArrayLike<{ transcript: string }>> }) => void) | null;
  onerror: ((event: unknown) => void) | null;
  onend: (() => void) | null;
  start(): void;
  stop(): void;
}

export function recognitionSupported(): boolean {
  return getRecognitionCtor() !== null;
}

function getRecognitionCtor(): RecognitionCtor | null {
  if (typeof window === 'undefined') return null;
  const w = window as unknown as Record<string, unknown>;
  return (w.SpeechRecognition as RecognitionCtor) || (w.webkitSpeechRecognition as RecognitionCtor) || null;
}

/**
 * Record one utterance and resolve with its transcript. Rejects when
 * recognition is unsupported or errors; callers fall back to text input.
 */
export function captureUtterance(language: string): Promise<string> {
  const Ctor = getRecognitionCtor();
  if (!Ctor) return Promise.reject(new Error('speech recognition not supported'));
  return new Promise((resolve, reject) => {
    const recognition = new Ctor();
    recognition.lang = language === 'de' ? 'de-DE' : 'en-US';
    recognition.interimResults = false;
    recognition.maxAlternatives = 1;
    let settled = false;
    recognition.onresult = (event) => {
      settled = true;
      resolve(event.results[0][0].transcript);
    };
    recognition.onerror = (event) => {
      if (!settled) reject(new Error(`recognition error: ${String(event)}`));
    };
    recognition.onend = () => {
      if (!settled) reject(new Error('no speech detected'));
    };
    recognition.start();
  });
}
