"""
Запуск всех наборов тестов innokit по очереди
"""
import subprocess
import sys
from pathlib import Path

TESTS_DIR = Path(__file__).parent

TEST_SUITE = [
    ("test_distributions.py", "Энтропия, Pmf и генератор"),
    ("test_continuous.py", "Точное инновационное представление"),
    ("test_lossy.py", "Потерьное представление бинарных цепей"),
    ("test_mec.py", "Связка минимальной энтропии"),
    ("test_causal.py", "Направление причинности"),
    ("test_ikea.py", "Раскладка по колонкам"),
    ("test_cli.py", "Командная строка"),
    ("test_scripts.py", "Скрипты экспериментов"),
]


def run_test_file(test_file: str, description: str) -> bool:
    """Запускает отдельный тестовый файл"""
    print(f"\n{'=' * 80}")
    print(f"📋 {description}".center(80))
    print("=" * 80)

    try:
        result = subprocess.run([sys.executable, test_file], text=True, cwd=TESTS_DIR.parent)
        return result.returncode == 0
    except OSError as e:
        print(f"❌ Ошибка запуска теста: {e}")
        return False


def main() -> int:
    print("\n" + " 🚀 ЗАПУСК ВСЕХ ТЕСТОВ INNOKIT ".center(80, "="))

    results = []
    for name, description in TEST_SUITE:
        test_file = TESTS_DIR / name
        if test_file.exists():
            results.append((description, run_test_file(str(test_file), description)))
        else:
            print(f"\n⚠️  Файл {test_file} не найден, пропускаем...")
            results.append((description, False))

    print("\n\n" + "=" * 80)
    print("📊 ИТОГОВЫЙ ОТЧЁТ".center(80))
    print("=" * 80)

    passed = sum(1 for _, success in results if success)
    failed = len(results) - passed
    for i, (description, success) in enumerate(results, 1):
        status = "✅ PASSED" if success else "❌ FAILED"
        print(f"{i}. {status} - {description}")

    print("\n" + "=" * 80)
    print(f"Пройдено: {passed}/{len(results)}")
    print(f"Провалено: {failed}/{len(results)}")

    if failed:
        print("\n" + f"⚠️  {failed} НАБОР(ОВ) ТЕСТОВ ПРОВАЛИЛИСЬ!".center(80))
        print("=" * 80 + "\n")
        return 1
    print("\n" + "🎉 ВСЕ ТЕСТЫ ПРОШЛИ!".center(80))
    print("=" * 80 + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
