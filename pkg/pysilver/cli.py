"""
The pysilver command line. Every command reads one experiment config, optionally
overridden by global flags, and consumes the files the previous stage wrote:

    harvest -> prepare -> train -> predict / eval

with cv, curve, coarsen and convert alongside. Exit codes are 0 on success, 2
for a missing input file, 3 for training data that cannot support a model, 4
for a label outside the class scheme, and 1 for anything else.
"""

import argparse
import json
import logging
import os
import sys
from itertools import islice
from typing import (Any, Callable, Dict, Iterable, Iterator, List, Optional,
                    Sequence, Tuple)

from pysilver import corpus, evaluation, load, pipeline
from pysilver._parser import ReadStats, iter_records
from pysilver._version import __version__
from pysilver.config import ExperimentConfig
from pysilver.exception import (CorpusError, EvaluationError, ParseError,
                                SchemeError, TrainingError)
from pysilver.svm import MulticlassModel
from pysilver.textproc import Variant
from pysilver.unit.example import LabeledExample
from pysilver.unit.scheme import ClassScheme

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_MISSING_INPUT = 2
EXIT_DEGENERATE_DATA = 3
EXIT_LABEL_MISMATCH = 4

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

PREDICT_BATCH = 10000


def _require_files(*paths: Optional[str]) -> None:
    for path in paths:
        if path is None:
            raise FileNotFoundError('A required input path is not configured')
        if not os.path.isfile(path):
            raise FileNotFoundError(f'Input file not found: {path}')


def _write_json(obj: Any, path: str) -> None:
    _ensure_dir(path)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(obj, f, ensure_ascii=False, indent=2)
        f.write('\n')


def _ensure_dir(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


class LabelSpace:
    """
    The classes a command works with and how to bring an example's label into
    them. In coarse mode fine labels are folded into coarse ones.
    """
    def __init__(self, scheme: ClassScheme, coarse: bool) -> None:
        self.scheme = scheme
        self.coarse = coarse
        self.classes = scheme.coarse_list if coarse else scheme.class_list
        self.allowed = set(self.classes)
        if coarse:
            self.allowed.update(scheme.class_list)

    def relabel(self, example: LabeledExample) -> LabeledExample:
        if self.coarse and example.label in self.scheme:
            return corpus.coarsen(example, self.scheme)
        return example

    def load(self, path: str) -> List[LabeledExample]:
        """
        Load a labeled corpus, checking every label against the scheme.

        Raises:
            SchemeError: If a label is outside the scheme, naming the line.
        """
        _require_files(path)
        return [
            self.relabel(e)
            for e in load.iter_examples_from_file(path, classes=self.allowed)
        ]


def _scheme(config: ExperimentConfig) -> ClassScheme:
    path = config.paths['scheme']
    if path is None:
        return ClassScheme.default()

    _require_files(path)
    try:
        return ClassScheme.load(path)
    except SchemeError as err:
        raise ParseError(f'Invalid scheme file {path}: {err}') from err


def _class_sizes(examples: Iterable[LabeledExample]) -> Dict[str, int]:
    sizes: Dict[str, int] = {}
    for example in examples:
        sizes[example.label] = sizes.get(example.label, 0) + 1
    return dict(sorted(sizes.items()))


def cmd_harvest(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Join tweets with video metadata into a deduplicated silver corpus, and write
    the corpus and its statistics.
    """
    tweets_path = args.tweets or config.paths['tweets']
    videos_path = args.videos or config.paths['videos']
    _require_files(tweets_path, videos_path)

    scheme = _scheme(config)
    if config.coarse:
        scheme = scheme.coarse_scheme()

    tweet_stats = ReadStats()
    video_stats = ReadStats()
    transfer_stats = corpus.TransferStats()
    dedup_stats = corpus.DedupStats()

    videos = load.load_video_map(videos_path, lenient=True, stats=video_stats)
    tweets = load.iter_tweets_from_file(tweets_path, lenient=True, stats=tweet_stats)
    examples = corpus.dedupe(
        corpus.transfer_labels(tweets, videos, scheme, transfer_stats), dedup_stats)

    out_path = args.output or config.paths['corpus']
    _ensure_dir(out_path)
    with open(out_path, 'w', encoding='utf-8') as f:
        written = load.write_records(examples, f)

    stats = {
        'tweets': tweet_stats.to_json(),
        'videos': video_stats.to_json(),
        'transfer': transfer_stats.to_json(),
        'dedup': dedup_stats.to_json(),
        'written': written,
        'seed': config.seed,
        'config': config.to_json()
    }
    _write_json(stats, config.paths.output('harvest_stats.json'))
    logger.info('Harvested %d examples from %d tweets into %s.', written,
                tweet_stats.records, out_path)


def cmd_prepare(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Draw a balanced sample of the corpus and split a fixed number of examples of
    every class off for testing.
    """
    space = LabelSpace(_scheme(config), config.coarse)
    examples = space.load(args.corpus or config.paths['corpus'])

    sampling = config.sampling
    sample = corpus.balance_sample(corpus.group_by_class(examples), sampling.cap,
                                   config.seed, sampling.class_caps)
    balanced = [e for group in sample.values() for e in group]
    train, test = corpus.split_holdout(balanced, sampling.per_class_test,
                                       config.seed)

    for key, part in (('train', train), ('test', test)):
        path = config.paths[key]
        _ensure_dir(path)
        with open(path, 'w', encoding='utf-8') as f:
            load.write_records(part, f)

    manifest = {
        'seed': config.seed,
        'train': {'size': len(train), 'per_class': _class_sizes(train)},
        'test': {'size': len(test), 'per_class': _class_sizes(test)},
        'config': config.to_json()
    }
    _write_json(manifest, config.paths.output('split_manifest.json'))
    logger.info('Prepared %d training and %d test examples.', len(train),
                len(test))


def cmd_train(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Train a model with the configured variant and write it.
    """
    space = LabelSpace(_scheme(config), config.coarse)
    examples = space.load(args.train or config.paths['train'])

    model = pipeline.fit(examples, space.classes, config.text_pipeline,
                         config.n_per_class, config.train)

    path = args.model or config.paths['model']
    _ensure_dir(path)
    model.save(path)
    logger.info('Wrote a %d class model over %d terms to %s.',
                len(model.class_list), len(model.feature_space), path)


def _text_record(obj: Dict[str, Any]) -> Tuple[Any, str]:
    text = obj.get('text')
    if not isinstance(text, str):
        raise ParseError('Record has no text')
    return obj.get('id'), text


def _batches(it: Iterator[Any], size: int) -> Iterator[List[Any]]:
    while True:
        batch = list(islice(it, size))
        if not batch:
            return
        yield batch


def cmd_predict(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Predict the class of every post of a JSON-lines file with a text key,
    streaming the predictions out in batches.
    """
    model_path = args.model or config.paths['model']
    _require_files(model_path, args.input)
    model = MulticlassModel.load(model_path)

    n = 0
    _ensure_dir(args.output)
    with open(args.input, encoding='utf-8') as fin, open(args.output,
                                                           'w',
                                                           encoding='utf-8') as fout:
        records = iter_records(fin, _text_record)
        for batch in _batches(records, PREDICT_BATCH):
            predicted = pipeline.predict_texts(model, (text for _, text in batch))
            for (record_id, text), label in zip(batch, predicted):
                row: Dict[str, Any] = {}
                if record_id is not None:
                    row['id'] = record_id
                row['text'] = text
                row['predicted'] = label
                fout.write(json.dumps(row, ensure_ascii=False))
                fout.write('\n')
            n += len(batch)

    logger.info('Wrote %d predictions to %s.', n, args.output)


def _write_report(report: evaluation.EvalReport, name: str,
                  config: ExperimentConfig) -> None:
    with open(config.paths.output(f'{name}_matrix.tsv'), 'w', encoding='utf-8',
              newline='') as f:
        report.matrix.write_tsv(f)
    logger.info('%s: accuracy %.3f, macro P %.3f R %.3f F1 %.3f.', name,
                report.accuracy, report.macro.precision, report.macro.recall,
                report.macro.f1)


def cmd_eval(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Evaluate a model on the silver test set, the gold set and the later test
    set, whichever are configured, or score a confusion matrix read from a file.
    """
    scheme = _scheme(config)
    os.makedirs(config.paths.output(''), exist_ok=True)

    reports: Dict[str, evaluation.EvalReport] = {}
    if args.matrix:
        _require_files(args.matrix)
        matrix = evaluation.read_matrix_tsv(args.matrix)
        reports['matrix'] = evaluation.macro_report(matrix)
        if config.coarse:
            reports['matrix_coarse'] = evaluation.macro_report(
                evaluation.coarsen_matrix(matrix, scheme))
    else:
        model_path = args.model or config.paths['model']
        _require_files(model_path)
        model = MulticlassModel.load(model_path)
        space = LabelSpace(scheme, set(model.class_list) != set(scheme.class_list))

        test_sets = {}
        for name, path in (('silver', args.test or config.paths['test']),
                           ('gold', args.gold or config.paths['gold'])):
            if path is not None:
                test_sets[name] = space.load(path)
        reports.update(evaluation.silver_gold_eval(model, test_sets))

        later = args.later or config.paths['later_test']
        if later is not None:
            reports['later'] = evaluation.drift_eval(model, space.load(later))

        if config.coarse and not space.coarse:
            for name in list(reports):
                reports[f'{name}_coarse'] = evaluation.macro_report(
                    evaluation.coarsen_matrix(reports[name].matrix, scheme),
                    reports[name].metadata)

        if 'silver' in test_sets:
            reports['random'] = evaluation.random_baseline(
                test_sets['silver'], model.class_list, config.seed)

    for name, report in reports.items():
        _write_report(report, name, config)
    _write_json({name: r.to_json() for name, r in reports.items()},
                config.paths.output('report.json'))


def cmd_cv(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Cross validate the configured pipeline on a labeled corpus, by default the
    gold set.
    """
    space = LabelSpace(_scheme(config), config.coarse)
    examples = space.load(args.corpus or config.paths['gold'])

    report = evaluation.cross_validate(examples, args.folds or config.sampling.folds,
                                       space.classes, config.seed,
                                       config.text_pipeline, config.n_per_class,
                                       config.train)
    os.makedirs(config.paths.output(''), exist_ok=True)
    _write_report(report, 'cv', config)
    with open(config.paths.output('cv_report.json'), 'w', encoding='utf-8') as f:
        report.write(f)


def cmd_curve(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Train on growing balanced samples of the training set and write the learning
    curve as CSV.
    """
    sizes = args.sizes or config.sampling.curve_sizes
    if not sizes:
        raise ValueError('No learning curve sizes given')

    space = LabelSpace(_scheme(config), config.coarse)
    train = space.load(args.train or config.paths['train'])
    test = space.load(args.test or config.paths['test'])

    points = evaluation.learning_curve(train, sizes, test, space.classes,
                                       config.seed, config.text_pipeline,
                                       config.n_per_class, config.train,
                                       config.sampling.class_caps or None)

    path = config.paths.output('curve.csv')
    _ensure_dir(path)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        evaluation.write_curve_csv(points, f)
    logger.info('Wrote %d learning curve points to %s.', len(points), path)


def cmd_coarsen(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Relabel a corpus with coarse classes.
    """
    space = LabelSpace(_scheme(config), True)
    examples = space.load(args.input)

    _ensure_dir(args.output)
    with open(args.output, 'w', encoding='utf-8') as f:
        n = load.write_records(examples, f)
    logger.info('Wrote %d coarse examples to %s.', n, args.output)


def cmd_convert(config: ExperimentConfig, args: argparse.Namespace) -> None:
    """
    Convert a text<TAB>label gold file into a JSON-lines labeled corpus.
    """
    _require_files(args.input)
    space = LabelSpace(_scheme(config), config.coarse)
    examples = load.iter_examples_from_tsv(args.input, classes=space.allowed)

    _ensure_dir(args.output)
    with open(args.output, 'w', encoding='utf-8') as f:
        n = load.write_records(examples, f)
    logger.info('Converted %d examples into %s.', n, args.output)


COMMANDS: Dict[str, Callable[[ExperimentConfig, argparse.Namespace], None]] = {
    'harvest': cmd_harvest,
    'prepare': cmd_prepare,
    'train': cmd_train,
    'predict': cmd_predict,
    'eval': cmd_eval,
    'cv': cmd_cv,
    'curve': cmd_curve,
    'coarsen': cmd_coarsen,
    'convert': cmd_convert
}


def build_parser() -> argparse.ArgumentParser:
    """
    The argument parser of the command line, with global flags and one sub
    parser per command.
    """
    parser = argparse.ArgumentParser(
        prog='pysilver',
        description='Train tweet topic classifiers on labels transferred from linked videos.')
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('--config', help='experiment config JSON file')
    parser.add_argument('--seed', type=int, help='override the config seed')
    parser.add_argument('--variant', choices=[v.value for v in Variant],
                        help='override the config variant')
    parser.add_argument('--coarse', action='store_true',
                        help='work with the coarse classes')
    parser.add_argument('--log-level', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('harvest', help='build a silver corpus from tweets and videos')
    p.add_argument('--tweets')
    p.add_argument('--videos')
    p.add_argument('--output')

    p = sub.add_parser('prepare', help='balance and split a corpus')
    p.add_argument('--corpus')

    p = sub.add_parser('train', help='train a model')
    p.add_argument('--train')
    p.add_argument('--model')

    p = sub.add_parser('predict', help='predict the classes of posts')
    p.add_argument('--model')
    p.add_argument('--input', required=True)
    p.add_argument('--output', required=True)

    p = sub.add_parser('eval', help='evaluate a model or score a matrix')
    p.add_argument('--model')
    p.add_argument('--test')
    p.add_argument('--gold')
    p.add_argument('--later', help='test set harvested after the training data')
    p.add_argument('--matrix', help='score a TSV confusion matrix instead')

    p = sub.add_parser('cv', help='cross validate on a labeled corpus')
    p.add_argument('--corpus')
    p.add_argument('--folds', type=int)

    p = sub.add_parser('curve', help='compute a learning curve')
    p.add_argument('--train')
    p.add_argument('--test')
    p.add_argument('--sizes', type=int, nargs='+')

    p = sub.add_parser('coarsen', help='relabel a corpus with coarse classes')
    p.add_argument('--input', required=True)
    p.add_argument('--output', required=True)

    p = sub.add_parser('convert', help='convert a TSV gold file to JSON-lines')
    p.add_argument('--input', required=True)
    p.add_argument('--output', required=True)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command.

    Args:
        argv: The arguments, defaults to the process arguments.

    Returns:
        The exit code.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT)

    try:
        if args.config:
            _require_files(args.config)
            config = ExperimentConfig.load(args.config)
        else:
            config = ExperimentConfig()
        config.override(args.seed, args.variant, args.coarse)

        COMMANDS[args.command](config, args)
    except FileNotFoundError as err:
        logger.error('%s', err)
        return EXIT_MISSING_INPUT
    except SchemeError as err:
        logger.error('%s', err)
        return EXIT_LABEL_MISMATCH
    except (TrainingError, CorpusError) as err:
        logger.error('%s%s', err, f' ({err.__cause__})' if err.__cause__ else '')
        return EXIT_DEGENERATE_DATA
    except (ParseError, EvaluationError, ValueError, OSError) as err:
        logger.error('%s%s', err, f' ({err.__cause__})' if err.__cause__ else '')
        return EXIT_OTHER

    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
