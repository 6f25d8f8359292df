import io
import json
import os
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from unittest import TestCase
from unittest.mock import patch

from latkit.cli import build_parser, config_from_args, main
from latkit.model.report import Claim, ScenarioReport


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue()


class TestCli(TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def _write(self, name, content):
        path = os.path.join(self.directory.name, name)
        with open(path, 'w') as handle:
            handle.write(content if isinstance(content, str) else json.dumps(content))
        return path

    def test_hodge(self):
        """It should print the primitive Hodge numbers and signature of cubic fourfolds"""
        code, out = _run(['hodge', '4', '3'])
        self.assertEqual(0, code)
        document = json.loads(out)
        self.assertEqual([0, 1, 20, 1, 0], document['hodge'])
        self.assertEqual([21, 2], document['signature'])
        self.assertEqual([20, 2], document['primitive_signature'])

    def test_lattice_info(self):
        """It should describe a standard lattice by name"""
        code, out = _run(['lattice', 'info', 'A2'])
        self.assertEqual(0, code)
        document = json.loads(out)
        self.assertEqual((2, 3, [2, 0], 'even', False), (document['rank'], document['det'], document['signature'],
                                                          document['parity'], document['unimodular']))
        self.assertEqual([3], document['discriminant']['invariants'])

    def test_lattice_file(self):
        """It should read a lattice from a JSON file"""
        path = self._write('u.json', {"gram": [[0, 1], [1, 0]]})
        code, out = _run(['disc', path])
        self.assertEqual(0, code)
        self.assertEqual(1, json.loads(out)['order'])

    def test_glue_and_extend(self):
        """It should glue x1 + x2 in U and extend (+1, -1) to the swap"""
        basis = self._write('basis.json', {"basis": [[1, 1]]})
        plus = self._write('plus.json', {"matrix": [[1]]})
        minus = self._write('minus.json', {"matrix": [[-1]]})
        code, out = _run(['glue', 'U', basis])
        self.assertEqual(0, code)
        self.assertEqual(2, json.loads(out)['glue_order'])
        code, out = _run(['extend', 'U', basis, plus, minus])
        self.assertEqual(0, code)
        self.assertEqual([[0, 1], [1, 0]], json.loads(out)['matrix'])

    def test_residues(self):
        """It should report the twist of a Z/3 action on the Fermat cubic fourfold"""
        polynomial = self._write('f.json', {"variables": 6, "terms": [
            {"exponents": [3 * int(i == j) for j in range(6)], "coefficient": 1} for i in range(6)]})
        action = self._write('a.json', {"order": 3, "exponents": [1, 0, 0, 0, 0, 0]})
        code, out = _run(['residues', polynomial, action, '2'])
        self.assertEqual(0, code)
        self.assertEqual({"order": 3, "exponent": 2}, json.loads(out)['twist'])

    def test_output_file(self):
        """It should write the document to --output and leave no temporary file behind"""
        target = os.path.join(self.directory.name, 'hodge.json')
        code, out = _run(['--output', target, 'hodge', '3', '3'])
        self.assertEqual(0, code)
        self.assertEqual('', out)
        with open(target) as handle:
            self.assertEqual([0, 5, 5, 0], json.load(handle)['hodge'])
        self.assertEqual(['hodge.json'], os.listdir(self.directory.name))

    def test_unwritable_output(self):
        """It should exit 2 when the output directory does not exist"""
        target = os.path.join(self.directory.name, 'missing', 'out.json')
        self.assertEqual(2, _run(['-o', target, 'hodge', '3', '3'])[0])

    def test_verify(self):
        """It should exit 0 for a passing scenario"""
        code, out = _run(['verify', 'cubic-threefold-hodge'])
        self.assertEqual(0, code)
        self.assertTrue(json.loads(out)['pass'])

    def test_verify_all(self):
        """It should run every scenario through run_all and combine the reports"""
        reports = [ScenarioReport('first', [Claim('a', 'x', 1, 1, 'PAPER')]),
                   ScenarioReport('second', [Claim('b', 'y', 2, 2, 'DERIVED')])]
        with patch('latkit.cli.run_all', return_value=reports) as run_all:
            code, out = _run(['verify', 'all'])
        run_all.assert_called_once()
        self.assertEqual(0, code)
        document = json.loads(out)
        self.assertTrue(document['pass'])
        self.assertEqual(['first', 'second'], [r['scenario'] for r in document['reports']])

    def test_verify_resource_limit(self):
        """It should exit 3 when a scenario hits the module size bound"""
        code, out = _run(['--limit-fqm', '4', 'verify', 'genus4'])
        self.assertEqual(3, code)
        self.assertFalse(json.loads(out)['pass'])

    def test_input_errors(self):
        """It should exit 2 on malformed JSON, unknown names, bad limits and bad arguments"""
        self.assertEqual(2, _run(['lattice', 'info', self._write('bad.json', '{"gram": [[2]')])[0])
        self.assertEqual(2, _run(['lattice', 'info', 'X5'])[0])
        self.assertEqual(2, _run(['--limit-fqm', '0', 'hodge', '3', '3'])[0])
        self.assertEqual(2, _run(['hodge', '0', '3'])[0])
        self.assertEqual(2, _run(['verify', 'genus5'])[0])
        self.assertEqual(2, _run([])[0])

    def test_config(self):
        """It should collect global flags and subcommand arguments"""
        args = build_parser().parse_args(['-v', '--limit-group-order', '100', 'lattice', 'aut', 'E6'])
        config = config_from_args(args)
        self.assertEqual('lattice aut', config.subcommand)
        self.assertEqual(('E6',), config.inputs)
        self.assertEqual(100, config.limits.max_group_order)
        self.assertEqual(1, config.verbosity)
